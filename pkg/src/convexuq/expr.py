"""Recursive-descent parser and evaluator for limit-state expressions.

Grammar (standard precedence, power binding tightest and right
associative, then unary minus, then * and /, then + and -):

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?
    atom  := NUMBER | IDENT | '(' expr ')'

Identifiers are [A-Za-z_][A-Za-z0-9_]*. Offsets in errors are 0-based
byte positions into the source text.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

from .errors import (
    EvaluationError,
    LimitStateSyntaxError,
    UnboundVariable,
    UnknownCharacter,
)

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            # only trailing whitespace or an illegal character remains
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            offset = pos + (len(rest) - len(stripped))
            raise UnknownCharacter(f"unexpected character {stripped[0]!r}", offset)
        kind = match.lastgroup
        value = match.group(kind)
        tokens.append((kind, value, match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


@dataclass(frozen=True)
class LimitState:
    """Parsed limit-state function g over named variables."""

    source: str
    root: tuple
    variables: frozenset[str]

    def evaluate(self, env: Mapping[str, float]) -> float:
        missing = sorted(self.variables - set(env))
        if missing:
            raise UnboundVariable(f"unbound variable(s): {', '.join(missing)}", names=missing)
        value = _eval_node(self.root, env)
        if not math.isfinite(value):
            raise EvaluationError(f"non-finite value from '{self.source}'")
        return value


def _eval_node(node: tuple, env: Mapping[str, float]) -> float:
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return float(env[node[1]])
    if op == "neg":
        return -_eval_node(node[1], env)
    a = _eval_node(node[1], env)
    b = _eval_node(node[2], env)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0.0:
            raise EvaluationError("division by zero")
        return a / b
    if op == "^":
        if a < 0.0 and b != math.floor(b):
            raise EvaluationError("fractional power of a negative number")
        if a == 0.0 and b < 0.0:
            raise EvaluationError("zero raised to a negative power")
        try:
            return float(a**b)
        except OverflowError:
            raise EvaluationError("overflow in power") from None
    raise AssertionError(f"unknown node {op}")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.variables: set[str] = set()

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect_op(self, op: str) -> None:
        kind, value, offset = self.peek()
        if kind == "op" and value == op:
            self.advance()
            return
        raise LimitStateSyntaxError(f"expected '{op}'", offset)

    def parse(self) -> tuple:
        node = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            raise LimitStateSyntaxError(f"unexpected '{value}'", offset)
        return node

    def expr(self) -> tuple:
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = (value, node, self.term())
            else:
                return node

    def term(self) -> tuple:
        node = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = (value, node, self.unary())
            else:
                return node

    def unary(self) -> tuple:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return ("neg", self.unary())
        return self.power()

    def power(self) -> tuple:
        node = self.atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            # right associative; unary minus allowed in the exponent
            return ("^", node, self.unary())
        return node

    def atom(self) -> tuple:
        kind, value, offset = self.advance()
        if kind == "number":
            return ("num", float(value))
        if kind == "ident":
            self.variables.add(value)
            return ("var", value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        what = f"'{value}'" if value else "end of input"
        raise LimitStateSyntaxError(f"expected number, name, or '(', got {what}", offset)


def parse_limit_state(text: str) -> LimitState:
    """Parse an expression into a LimitState; raises LimitStateSyntaxError
    (with 0-based byte offset) or UnknownCharacter on bad input."""
    if not text.strip():
        raise LimitStateSyntaxError("empty expression", 0)
    parser = _Parser(text)
    root = parser.parse()
    return LimitState(source=text, root=root, variables=frozenset(parser.variables))
