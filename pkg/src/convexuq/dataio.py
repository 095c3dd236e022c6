"""CSV ingestion for sample sets and interval files.

Sample CSV: first line is a comma-separated header of variable names,
subsequent lines are decimal numbers ('.' separator, no thousands
separators, UTF-8). Interval file: one `name,lower,upper` line per
variable.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .domain import MarginalSpec, SampleSet, make_marginal_spec
from .errors import ParseError


def _parse_number(text: str, line: int, field: str) -> float:
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"cannot parse number '{text}'", line=line, field=field) from None


def read_samples_csv(path: str | Path) -> SampleSet:
    """Read a header+rows sample CSV into a SampleSet."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty sample file", line=1) from None
        names = tuple(name.strip() for name in header)
        if any(not name for name in names):
            raise ParseError("blank name in header", line=1)
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(names):
                raise ParseError(
                    f"expected {len(names)} values, got {len(record)}", line=lineno
                )
            rows.append(
                [_parse_number(cell, lineno, names[i]) for i, cell in enumerate(record)]
            )
    if not rows:
        raise ParseError("sample file has a header but no data rows", line=2)
    matrix = np.array(rows, dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise ParseError("non-finite value in sample file")
    return SampleSet(names=names, rows=matrix)


def write_samples_csv(path: str | Path, names, rows: np.ndarray) -> None:
    """Write a sample matrix in the same header+rows CSV format."""
    path = Path(path)
    rows = np.asarray(rows, dtype=float)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(names))
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


def read_intervals_csv(path: str | Path) -> MarginalSpec:
    """Read a `name,lower,upper` interval file into a MarginalSpec."""
    path = Path(path)
    triples = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, record in enumerate(reader, start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != 3:
                raise ParseError(
                    f"expected 'name,lower,upper', got {len(record)} fields", line=lineno
                )
            name = record[0].strip()
            if not name:
                raise ParseError("blank variable name", line=lineno)
            lower = _parse_number(record[1], lineno, "lower")
            upper = _parse_number(record[2], lineno, "upper")
            triples.append((name, lower, upper))
    if not triples:
        raise ParseError("interval file is empty", line=1)
    return make_marginal_spec(triples)
