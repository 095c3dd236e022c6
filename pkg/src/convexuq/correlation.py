"""Pairwise correlation measures and correlation-matrix assembly.

Two measures are supported. The sample correlation coefficient (SCC) is a
Pearson-style coefficient taken about the interval midpoints rather than
the sample means. The convex correlation coefficient (CCC) of a pair is
the parameter of the minimum-area member, within the model variant's 2D
family, that encloses all regularized sample pairs; the family of every
variant is parameterized by a single scalar r, and area strictly decreases
in |r|, so the fit is the feasible r of maximal magnitude.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateData,
    DimensionMismatch,
    DuplicatePair,
    InfeasibleFit,
    MissingPair,
    NotPositiveDefinite,
    ZeroDeviation,
)

EPS_PD = 1e-8
R_CLAMP = 1.0 - 1e-6
MEMBERSHIP_TOL = 1e-9
_GRID_STEP = 1e-3
_REFINE_TOL = 1e-7
_TIE_TOL = 1e-9


class ModelVariant(enum.Enum):
    """Convex model family selector; fixes the CCC geometry and the
    factorization rule that derives the domain shape from R."""

    ME = "me"
    MP1 = "mp1"
    MP2 = "mp2"
    RECT = "rect"
    LTRI = "ltri"
    UTRI = "utri"

    @property
    def label(self) -> str:
        return {
            ModelVariant.ME: "ME",
            ModelVariant.MP1: "MP-I",
            ModelVariant.MP2: "MP-II",
            ModelVariant.RECT: "RectMP",
            ModelVariant.LTRI: "LTriMP",
            ModelVariant.UTRI: "UTriMP",
        }[self]

    @property
    def is_parallelepiped(self) -> bool:
        return self is not ModelVariant.ME


@dataclass(frozen=True)
class RepairReport:
    """What ensure_positive_definite changed in repair mode."""

    lambda_min_before: float
    max_entry_change: float
    iterations: int


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric unit-diagonal matrix of pairwise coefficients."""

    entries: np.ndarray
    method: str  # "ccc" or "scc"
    variant: ModelVariant | None = None
    repair: RepairReport | None = None

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatch(f"correlation matrix must be square, got {entries.shape}")
        if self.method not in ("ccc", "scc"):
            raise ValueError(f"method must be 'ccc' or 'scc', got {self.method!r}")
        if not np.all(np.isfinite(entries)):
            raise ValueError("non-finite correlation entries")
        if np.max(np.abs(entries - entries.T)) > 1e-12:
            raise ValueError("correlation matrix not symmetric within 1e-12")
        if np.any(np.diag(entries) != 1.0):
            raise ValueError("correlation matrix diagonal must be exactly 1")
        off = entries[~np.eye(entries.shape[0], dtype=bool)]
        if off.size and np.max(np.abs(off)) >= 1.0:
            raise ValueError("off-diagonal correlation magnitude must be < 1")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def scc(x_i: np.ndarray, x_j: np.ndarray, mid_i: float, mid_j: float) -> float:
    """Sample correlation coefficient about the interval midpoints."""
    a = np.asarray(x_i, dtype=float) - mid_i
    b = np.asarray(x_j, dtype=float) - mid_j
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"columns must be 1-D and equal length, got {a.shape} and {b.shape}")
    if a.size < 2:
        raise DimensionMismatch("need at least 2 samples")
    denom_a = float(a @ a)
    denom_b = float(b @ b)
    if denom_a == 0.0 or denom_b == 0.0:
        raise ZeroDeviation("a column sits identically at its midpoint")
    value = float(a @ b) / np.sqrt(denom_a * denom_b)
    return float(np.clip(value, -1.0, 1.0))


def _mp_shape_2d(variant: ModelVariant, r: np.ndarray) -> np.ndarray:
    """Closed-form 2x2 shape matrices S(r) of an MP variant, vectorized
    over r; rows of each S have unit absolute sum. Matches the general
    factorization path (asserted in tests), with the r=0 member being the
    standard square for every variant."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty(r.shape + (2, 2))
    absr = np.abs(r)
    if variant is ModelVariant.MP1:
        d = 1.0 + absr
        out[..., 0, 0] = 1.0 / d
        out[..., 0, 1] = r / d
        out[..., 1, 0] = r / d
        out[..., 1, 1] = 1.0 / d
    elif variant is ModelVariant.MP2:
        sp = np.sqrt(1.0 + r)
        sm = np.sqrt(1.0 - r)
        p = (sp + sm) / 2.0
        q = (sp - sm) / 2.0
        d = p + np.abs(q)
        out[..., 0, 0] = p / d
        out[..., 0, 1] = q / d
        out[..., 1, 0] = q / d
        out[..., 1, 1] = p / d
    elif variant is ModelVariant.RECT:
        # eigen rule: columns ordered by descending eigenvalue 1+|r|, 1-|r|
        sp = np.sqrt(1.0 + absr)
        sm = np.sqrt(1.0 - absr)
        d = sp + sm
        pos = r > 0
        a, b = sp / d, sm / d
        out[..., 0, 0] = a
        out[..., 0, 1] = b
        out[..., 1, 0] = np.where(pos, a, -a)
        out[..., 1, 1] = np.where(pos, -b, b)
        zero = r == 0
        if np.any(zero):
            out[zero] = np.eye(2)
    elif variant is ModelVariant.LTRI:
        c = np.sqrt(1.0 - r * r)
        d = absr + c
        out[..., 0, 0] = 1.0
        out[..., 0, 1] = 0.0
        out[..., 1, 0] = r / d
        out[..., 1, 1] = c / d
    elif variant is ModelVariant.UTRI:
        c = np.sqrt(1.0 - r * r)
        d = c + absr
        out[..., 0, 0] = c / d
        out[..., 0, 1] = r / d
        out[..., 1, 0] = 0.0
        out[..., 1, 1] = 1.0
    else:
        raise ValueError(f"not a parallelepiped variant: {variant}")
    return out


def _mp_feasible(variant: ModelVariant, r: np.ndarray, u: np.ndarray) -> np.ndarray:
    """For each r, do all sample pairs u lie inside the variant's 2D
    domain |S(r)^-1 u| <= e (with membership tolerance)?"""
    shapes = _mp_shape_2d(variant, r)  # (G, 2, 2)
    a11, a12 = shapes[..., 0, 0], shapes[..., 0, 1]
    a21, a22 = shapes[..., 1, 0], shapes[..., 1, 1]
    det = a11 * a22 - a12 * a21
    u1, u2 = u[:, 0], u[:, 1]
    # delta = S^-1 u via the 2x2 adjugate, broadcast (G, N)
    d1 = (a22[:, None] * u1 - a12[:, None] * u2) / det[:, None]
    d2 = (-a21[:, None] * u1 + a11[:, None] * u2) / det[:, None]
    worst = np.maximum(np.abs(d1), np.abs(d2)).max(axis=1)
    return worst <= 1.0 + MEMBERSHIP_TOL


def _scc_sign(u: np.ndarray) -> float:
    s = float(u[:, 0] @ u[:, 1])
    return 1.0 if s >= 0.0 else -1.0


def _pick_extreme(r_neg: float | None, r_pos: float | None, u: np.ndarray) -> float:
    """Choose the fitted value among the two one-sided extremes by max |r|,
    breaking near-ties with the SCC sign of the pair."""
    if r_pos is None:
        return r_neg  # type: ignore[return-value]
    if r_neg is None:
        return r_pos
    if abs(abs(r_pos) - abs(r_neg)) <= _TIE_TOL:
        return r_pos if _scc_sign(u) >= 0 else r_neg
    return r_pos if abs(r_pos) > abs(r_neg) else r_neg


def _ccc_fit_me(u: np.ndarray, on_infeasible: str) -> float:
    """Closed-form ME fit: intersect the per-sample feasible r-intervals
    of the ellipse family u1^2 + u2^2 - 2 r u1 u2 <= 1 - r^2."""
    u1, u2 = u[:, 0], u[:, 1]
    prod = u1 * u2
    half = np.sqrt(np.maximum((1.0 - u1 * u1) * (1.0 - u2 * u2), 0.0))
    lo = float(np.max(prod - half))
    hi = float(np.min(prod + half))
    if lo > hi:
        gap = lo - hi
        if on_infeasible == "relax":
            warnings.warn(
                f"infeasible ME pair fit relaxed to minimax value (gap {gap:.3g})",
                DegenerateData,
            )
            return float(np.clip((lo + hi) / 2.0, -R_CLAMP, R_CLAMP))
        raise InfeasibleFit(
            f"no ellipse of the family encloses all pairs (feasible intervals "
            f"disjoint, gap {gap:.3g})",
            gap=gap,
        )
    lo_c, hi_c = max(lo, -R_CLAMP), min(hi, R_CLAMP)
    if lo_c > hi_c:
        # feasible interval lies entirely beyond the clamp
        warnings.warn("fit clamped at |r| = 1 - 1e-6", DegenerateData)
        return R_CLAMP if lo > 0 else -R_CLAMP
    r = _pick_extreme(lo_c, hi_c, u)
    if abs(r) >= R_CLAMP:
        warnings.warn("fit clamped at |r| = 1 - 1e-6", DegenerateData)
    return float(r)


def _refine_boundary(
    variant: ModelVariant, u: np.ndarray, r_feas: float, r_infeas: float
) -> float:
    """Bisect the feasibility boundary between a feasible and an
    infeasible r; returns the feasible end of the final bracket so the
    fitted domain still encloses every sample."""
    for _ in range(64):
        if abs(r_infeas - r_feas) <= _REFINE_TOL:
            break
        mid = (r_feas + r_infeas) / 2.0
        if bool(_mp_feasible(variant, np.array([mid]), u)[0]):
            r_feas = mid
        else:
            r_infeas = mid
    return r_feas


def _ccc_fit_mp(variant: ModelVariant, u: np.ndarray, on_infeasible: str) -> float:
    """Grid-plus-bisection fit for the MP families. Feasibility in r need
    not be a single interval, so both one-sided extremes of the feasible
    grid set are refined and the larger |r| wins."""
    steps = int((R_CLAMP - _GRID_STEP / 2) / _GRID_STEP)  # largest grid multiple below the clamp
    inner = np.arange(-steps, steps + 1) * _GRID_STEP
    grid = np.concatenate(([-R_CLAMP], inner, [R_CLAMP]))
    feas = _mp_feasible(variant, grid, u)
    if not np.any(feas):
        # unreachable for in-box pairs (r=0 is the standard square), kept defensive
        if on_infeasible == "relax":
            shapes = _mp_shape_2d(variant, grid)
            det = shapes[:, 0, 0] * shapes[:, 1, 1] - shapes[:, 0, 1] * shapes[:, 1, 0]
            d1 = (shapes[:, 1, 1, None] * u[:, 0] - shapes[:, 0, 1, None] * u[:, 1]) / det[:, None]
            d2 = (-shapes[:, 1, 0, None] * u[:, 0] + shapes[:, 0, 0, None] * u[:, 1]) / det[:, None]
            worst = np.maximum(np.abs(d1), np.abs(d2)).max(axis=1)
            warnings.warn("infeasible MP pair fit relaxed to minimax value", DegenerateData)
            return float(grid[int(np.argmin(worst))])
        raise InfeasibleFit("no parallelepiped of the family encloses all pairs")
    idx = np.flatnonzero(feas)
    i_hi, i_lo = int(idx[-1]), int(idx[0])
    if i_hi == len(grid) - 1:
        r_pos = R_CLAMP
    else:
        r_pos = _refine_boundary(variant, u, float(grid[i_hi]), float(grid[i_hi + 1]))
    if i_lo == 0:
        r_neg = -R_CLAMP
    else:
        r_neg = _refine_boundary(variant, u, float(grid[i_lo]), float(grid[i_lo - 1]))
    r = _pick_extreme(r_neg, r_pos, u)
    if abs(r) >= R_CLAMP:
        warnings.warn("fit clamped at |r| = 1 - 1e-6", DegenerateData)
        return float(np.sign(r) * R_CLAMP)
    return float(r)


def ccc_fit(
    variant: ModelVariant,
    u_pairs: np.ndarray,
    *,
    on_infeasible: str = "error",
) -> float:
    """Fit the convex correlation coefficient of one pair of regularized
    sample columns.

    u_pairs is an (N, 2) array with every entry in [-1, 1]. Returns the r
    of maximal |r| whose 2D domain encloses all pairs; ties between the
    positive and negative extremes go to the SCC sign. Fits reaching the
    clamp |r| = 1 - 1e-6 emit a DegenerateData warning. When no r is
    feasible (possible for ME even on in-box data), on_infeasible selects
    between raising InfeasibleFit ("error") and returning the
    minimax-violation r with a warning ("relax").
    """
    if on_infeasible not in ("error", "relax"):
        raise ValueError(f"on_infeasible must be 'error' or 'relax', got {on_infeasible!r}")
    u = np.asarray(u_pairs, dtype=float)
    if u.ndim != 2 or u.shape[1] != 2:
        raise DimensionMismatch(f"u_pairs must be (N, 2), got {u.shape}")
    if u.shape[0] < 1:
        raise DimensionMismatch("need at least one sample pair")
    if np.max(np.abs(u)) > 1.0 + 1e-9:
        raise ValueError("u_pairs entries must lie in [-1, 1]")
    if variant is ModelVariant.ME:
        return _ccc_fit_me(u, on_infeasible)
    return _ccc_fit_mp(variant, u, on_infeasible)


def assemble_correlation_matrix(
    pairwise: list[tuple[int, int, float]],
    n: int,
    method: str,
    variant: ModelVariant | None = None,
) -> CorrelationMatrix:
    """Assemble the symmetric unit-diagonal matrix from n(n-1)/2 pairwise
    coefficients given as (i, j, r) with 0-based i < j."""
    matrix = np.eye(n)
    seen = set()
    for i, j, r in pairwise:
        if not (0 <= i < j < n):
            raise MissingPair(f"pair index ({i}, {j}) invalid for n={n}; need 0 <= i < j < n")
        if (i, j) in seen:
            raise DuplicatePair(f"pair ({i}, {j}) supplied twice")
        if not abs(r) < 1.0:
            raise ValueError(f"|r| must be < 1, got {r} for pair ({i}, {j})")
        seen.add((i, j))
        matrix[i, j] = matrix[j, i] = float(r)
    expected = n * (n - 1) // 2
    if len(seen) != expected:
        absent = [
            (i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in seen
        ]
        raise MissingPair(f"{expected} pairs required, got {len(seen)}; missing {absent}")
    return CorrelationMatrix(entries=matrix, method=method, variant=variant)


def ensure_positive_definite(R: CorrelationMatrix, policy: str = "strict") -> CorrelationMatrix:
    """Check or restore positive definiteness.

    strict: return R unchanged when its smallest eigenvalue is at least
    EPS_PD, raise NotPositiveDefinite otherwise. repair: clip eigenvalues
    at EPS_PD and rescale back to an exact unit diagonal (repeated until
    the floor holds; the congruence rescaling preserves definiteness), and
    attach a report with the prior smallest eigenvalue and the largest
    entry change.
    """
    if policy not in ("strict", "repair"):
        raise ValueError(f"policy must be 'strict' or 'repair', got {policy!r}")
    entries = R.entries
    lam_before = float(np.linalg.eigvalsh(entries)[0])
    if lam_before >= EPS_PD:
        return R
    if policy == "strict":
        raise NotPositiveDefinite(
            f"smallest eigenvalue {lam_before:.3e} below {EPS_PD:.0e}",
            lambda_min=lam_before,
        )
    fixed = entries.copy()
    iterations = 0
    for iterations in range(1, 51):
        lam, vec = np.linalg.eigh(fixed)
        if lam[0] >= EPS_PD:
            break
        # clip a bit above the floor: the unit-diagonal rescale that follows
        # pulls the smallest eigenvalue back down slightly
        clipped = (vec * np.maximum(lam, 1.05 * EPS_PD)) @ vec.T
        scale = np.sqrt(np.diag(clipped))
        fixed = clipped / np.outer(scale, scale)
        fixed = (fixed + fixed.T) / 2.0
        np.fill_diagonal(fixed, 1.0)
    report = RepairReport(
        lambda_min_before=lam_before,
        max_entry_change=float(np.max(np.abs(fixed - entries))),
        iterations=iterations,
    )
    return CorrelationMatrix(
        entries=fixed, method=R.method, variant=R.variant, repair=report
    )


def fit_correlation_matrix(
    method: str,
    variant: ModelVariant,
    u_rows: np.ndarray,
    *,
    on_infeasible: str = "error",
) -> CorrelationMatrix:
    """Compute all pairwise coefficients from regularized sample rows and
    assemble the matrix. SCC values that land exactly at ±1 are pulled to
    the clamp with a DegenerateData warning so assembly stays valid."""
    u = np.asarray(u_rows, dtype=float)
    if u.ndim != 2:
        raise DimensionMismatch(f"u_rows must be 2-D, got shape {u.shape}")
    n = u.shape[1]
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            if method == "scc":
                r = scc(u[:, i], u[:, j], 0.0, 0.0)
                if abs(r) >= 1.0:
                    warnings.warn(
                        f"SCC of pair ({i}, {j}) is exactly ±1; clamped", DegenerateData
                    )
                    r = float(np.sign(r)) * R_CLAMP
            elif method == "ccc":
                r = ccc_fit(variant, u[:, (i, j)], on_infeasible=on_infeasible)
            else:
                raise ValueError(f"method must be 'ccc' or 'scc', got {method!r}")
            pairs.append((i, j, r))
    return assemble_correlation_matrix(
        pairs, n, method, variant if method == "ccc" else None
    )
