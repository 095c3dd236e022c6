"""Interval primitives, sample containers, and the regularization map.

Regularization sends each interval variable onto the standard interval
[-1, 1] via u = (x - midpoint)/radius; deregularization is the exact
inverse. Samples are validated against their marginal intervals before
regularization, with an absolute slack of BOUND_SLACK to absorb I/O
rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateInterval,
    DimensionMismatch,
    DuplicateName,
    NameMismatch,
    SampleOutsideMarginal,
)

# absolute slack on interval-bound comparisons (I/O rounding absorption)
BOUND_SLACK = 1e-12


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval [lower, upper] with positive radius."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise DegenerateInterval(f"non-finite interval bounds [{self.lower}, {self.upper}]")
        if not self.lower < self.upper:
            raise DegenerateInterval(f"interval [{self.lower}, {self.upper}] has zero or negative width")

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2.0

    @property
    def radius(self) -> float:
        return (self.upper - self.lower) / 2.0


@dataclass(frozen=True)
class MarginalSpec:
    """Ordered named intervals; carries the midpoint vector and the
    diagonal radius scaling of the regularization map."""

    names: tuple[str, ...]
    intervals: tuple[Interval, ...]

    def __post_init__(self) -> None:
        if len(self.names) == 0:
            raise DegenerateInterval("marginal spec needs at least one variable")
        if len(self.names) != len(self.intervals):
            raise DimensionMismatch(
                f"{len(self.names)} names but {len(self.intervals)} intervals"
            )
        seen = set()
        for name in self.names:
            if not name:
                raise DuplicateName("empty variable name")
            if name in seen:
                raise DuplicateName(f"duplicate variable name '{name}'")
            seen.add(name)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def midpoints(self) -> np.ndarray:
        return np.array([iv.midpoint for iv in self.intervals])

    @property
    def radii(self) -> np.ndarray:
        return np.array([iv.radius for iv in self.intervals])

    @property
    def lowers(self) -> np.ndarray:
        return np.array([iv.lower for iv in self.intervals])

    @property
    def uppers(self) -> np.ndarray:
        return np.array([iv.upper for iv in self.intervals])

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise NameMismatch(f"variable '{name}' not in spec {self.names}") from None


def make_marginal_spec(pairs: Iterable[tuple[str, float, float]]) -> MarginalSpec:
    """Build a MarginalSpec from (name, lower, upper) triples."""
    pairs = list(pairs)
    names = tuple(str(p[0]) for p in pairs)
    intervals = tuple(Interval(float(p[1]), float(p[2])) for p in pairs)
    return MarginalSpec(names=names, intervals=intervals)


@dataclass(frozen=True)
class SampleSet:
    """Named sample matrix, one row per observation, physical units."""

    names: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2:
            raise DimensionMismatch(f"sample rows must be 2-D, got shape {rows.shape}")
        if rows.shape[0] < 1 or rows.shape[1] < 1:
            raise DimensionMismatch(f"empty sample matrix (shape {rows.shape})")
        if rows.shape[1] != len(self.names):
            raise DimensionMismatch(
                f"{len(self.names)} names but {rows.shape[1]} sample columns"
            )
        if not np.all(np.isfinite(rows)):
            raise ValueError("sample matrix contains non-finite entries")
        seen = set()
        for name in self.names:
            if not name:
                raise DuplicateName("empty variable name in sample header")
            if name in seen:
                raise DuplicateName(f"duplicate sample column '{name}'")
            seen.add(name)
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def n_samples(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def aligned_to(self, names: Sequence[str]) -> "SampleSet":
        """Reorder columns to match `names`; raises NameMismatch if the
        name sets differ."""
        if tuple(names) == self.names:
            return self
        if set(names) != set(self.names):
            raise NameMismatch(
                f"sample columns {self.names} do not match spec names {tuple(names)}"
            )
        order = [self.names.index(name) for name in names]
        return SampleSet(names=tuple(names), rows=self.rows[:, order].copy())


@dataclass(frozen=True)
class RegularizedSamples:
    """Dimensionless sample matrix with every entry in [-1, 1]."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def n_samples(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]


class Violation(NamedTuple):
    row: int
    column: int
    value: float
    lower: float
    upper: float


@dataclass(frozen=True)
class ValidationReport:
    """Out-of-interval entries found by validate_samples; empty means valid."""

    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_samples(spec: MarginalSpec, samples: SampleSet) -> ValidationReport:
    """List every sample entry outside its marginal interval (with slack)."""
    aligned = samples.aligned_to(spec.names)
    lowers, uppers = spec.lowers, spec.uppers
    rows = aligned.rows
    low_bad = rows < lowers - BOUND_SLACK
    high_bad = rows > uppers + BOUND_SLACK
    bad = np.argwhere(low_bad | high_bad)
    violations = tuple(
        Violation(int(r), int(c), float(rows[r, c]), float(lowers[c]), float(uppers[c]))
        for r, c in bad
    )
    return ValidationReport(violations=violations)


def regularize(spec: MarginalSpec, samples: SampleSet) -> RegularizedSamples:
    """Map samples into the standard box: u = (x - midpoint)/radius.

    Hard-errors on out-of-interval entries instead of clipping; entries
    inside the slack band are clamped onto [-1, 1] so downstream fits can
    rely on the box invariant.
    """
    aligned = samples.aligned_to(spec.names)
    report = validate_samples(spec, aligned)
    if not report.ok:
        first = report.violations[0]
        raise SampleOutsideMarginal(
            f"sample row {first.row}, column {first.column} "
            f"({spec.names[first.column]}): value {first.value} outside "
            f"[{first.lower}, {first.upper}] "
            f"({len(report.violations)} violation(s) total)",
            violations=report.violations,
        )
    u = (aligned.rows - spec.midpoints) / spec.radii
    np.clip(u, -1.0, 1.0, out=u)
    return RegularizedSamples(rows=u)


def deregularize(spec: MarginalSpec, u_points: np.ndarray) -> np.ndarray:
    """Inverse regularization: x = midpoint + radius * u, row-wise."""
    u = np.asarray(u_points, dtype=float)
    cols = u.shape[-1] if u.ndim else 0
    if u.ndim not in (1, 2) or cols != spec.n:
        raise DimensionMismatch(
            f"expected {spec.n} columns, got array of shape {u.shape}"
        )
    return spec.midpoints + spec.radii * u
