"""Convex model construction, membership, assessment, and serialization.

The ellipsoid (ME) domain is {X : (X-X^m)ᵀ C⁻¹ (X-X^m) ≤ 1} with
C = D·R·D, where D is the diagonal of radii. Every parallelepiped (MP)
domain is {X : |(D·S)⁻¹(X-X^m)| ≤ e} with S the variant's shape matrix.
The characteristic matrix (the inverse appearing in the inequality) is
computed once at build time.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .correlation import EPS_PD, CorrelationMatrix, ModelVariant
from .domain import MarginalSpec, SampleSet, make_marginal_spec
from .errors import (
    DimensionMismatch,
    IllConditioned,
    IndexOutOfRange,
    NotEllipsoid,
    NotPositiveDefinite,
    ParseError,
)
from .factorization import ShapeMatrix, core_shape_matrix, shape_matrix

MEMBERSHIP_TOL = 1e-9
_COND_WARN = 1e12
FORMAT_VERSION = 1


class Membership(NamedTuple):
    inside: bool
    value: float  # quadratic form (ME) or max abs standardized coordinate (MP)


@dataclass(frozen=True)
class AssessmentReport:
    enclosed: int
    total: int
    kappa: float
    nu: float
    nu_bar: float
    excluded: tuple[int, ...]  # 0-based sample row indices outside the domain

    def to_dict(self) -> dict:
        return {
            "enclosed": self.enclosed,
            "total": self.total,
            "kappa": self.kappa,
            "nu": self.nu,
            "nu_bar": self.nu_bar,
            "excluded": list(self.excluded),
        }


@dataclass(frozen=True)
class ConvexModel:
    variant: ModelVariant
    spec: MarginalSpec
    R: CorrelationMatrix
    shape: ShapeMatrix | None  # MP variants only
    characteristic: np.ndarray  # ME: C⁻¹; MP: (D·S)⁻¹
    covariance: np.ndarray | None  # ME only: C = D·R·D
    cholesky: np.ndarray | None  # ME only: lower P with P·Pᵀ = R
    dx_shape: np.ndarray | None  # MP only: D·S

    def __post_init__(self) -> None:
        for field in ("characteristic", "covariance", "cholesky", "dx_shape"):
            arr = getattr(self, field)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                arr.flags.writeable = False
                object.__setattr__(self, field, arr)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def midpoints(self) -> np.ndarray:
        return self.spec.midpoints

    @property
    def radii(self) -> np.ndarray:
        return self.spec.radii


def _warn_if_ill_conditioned(matrix: np.ndarray, what: str) -> None:
    cond = np.linalg.cond(matrix)
    if cond > _COND_WARN:
        warnings.warn(f"{what} condition number {cond:.3g} above 1e12", IllConditioned)


def build_model(variant: ModelVariant, spec: MarginalSpec, R: CorrelationMatrix) -> ConvexModel:
    """Construct the model for a variant from a marginal spec and a
    positive-definite correlation matrix."""
    if R.n != spec.n:
        raise DimensionMismatch(f"R is {R.n}x{R.n} but spec has {spec.n} variables")
    lam_min = R.lambda_min
    if lam_min < EPS_PD:
        raise NotPositiveDefinite(
            f"correlation matrix smallest eigenvalue {lam_min:.3e} below {EPS_PD:.0e}",
            lambda_min=lam_min,
        )
    radii = spec.radii
    if variant is ModelVariant.ME:
        covariance = R.entries * np.outer(radii, radii)
        _warn_if_ill_conditioned(covariance, "covariance matrix")
        characteristic = np.linalg.inv(covariance)
        chol = np.linalg.cholesky(R.entries)
        return ConvexModel(
            variant=variant,
            spec=spec,
            R=R,
            shape=None,
            characteristic=characteristic,
            covariance=covariance,
            cholesky=chol,
            dx_shape=None,
        )
    H = core_shape_matrix(variant, R)
    S = shape_matrix(H)
    dx_shape = radii[:, None] * S.entries
    _warn_if_ill_conditioned(dx_shape, "combined shape matrix")
    characteristic = np.linalg.inv(dx_shape)
    return ConvexModel(
        variant=variant,
        spec=spec,
        R=R,
        shape=S,
        characteristic=characteristic,
        covariance=None,
        cholesky=None,
        dx_shape=dx_shape,
    )


def membership_values(model: ConvexModel, rows: np.ndarray) -> np.ndarray:
    """Defining-inequality value for each row; ≤ 1 means inside."""
    rows = np.asarray(rows, dtype=float)
    squeeze = rows.ndim == 1
    rows = np.atleast_2d(rows)
    if rows.shape[1] != model.n:
        raise DimensionMismatch(f"points have {rows.shape[1]} columns, model has {model.n}")
    centered = rows - model.midpoints
    if model.variant is ModelVariant.ME:
        values = np.einsum("ij,jk,ik->i", centered, model.characteristic, centered)
    else:
        values = np.max(np.abs(centered @ model.characteristic.T), axis=1)
    return values[0] if squeeze else values


def contains(model: ConvexModel, x: np.ndarray) -> Membership:
    """Membership with the defining-inequality value as diagnostic slack."""
    value = float(membership_values(model, np.asarray(x, dtype=float)))
    return Membership(inside=bool(value <= 1.0 + MEMBERSHIP_TOL), value=value)


def volume_ratio(model: ConvexModel) -> tuple[float, float]:
    """Analytic (nu, nu_bar): domain volume over the marginal box volume,
    and its n-th root."""
    n = model.n
    if model.variant is ModelVariant.ME:
        sphere = math.pi ** (n / 2.0) / math.gamma((n + 2) / 2.0)
        det_r = float(np.linalg.det(model.R.entries))
        nu = sphere * math.sqrt(max(det_r, 0.0)) / 2.0**n
    else:
        nu = abs(float(np.linalg.det(model.shape.entries)))
    return nu, nu ** (1.0 / n)


def fitness(model: ConvexModel, samples: SampleSet) -> AssessmentReport:
    """Count enclosed samples and attach the analytic volume ratios."""
    aligned = samples.aligned_to(model.spec.names)
    values = membership_values(model, aligned.rows)
    outside = np.flatnonzero(values > 1.0 + MEMBERSHIP_TOL)
    total = aligned.n_samples
    enclosed = total - outside.size
    nu, nu_bar = volume_ratio(model)
    return AssessmentReport(
        enclosed=int(enclosed),
        total=int(total),
        kappa=enclosed / total,
        nu=nu,
        nu_bar=nu_bar,
        excluded=tuple(int(k) for k in outside),
    )


def project_2d(model: ConvexModel, i: int, j: int) -> np.ndarray:
    """Exact projection of the regularized ellipsoid onto the (U_i, U_j)
    plane: the 2x2 correlation submatrix (0-based indices)."""
    if model.variant is not ModelVariant.ME:
        raise NotEllipsoid(
            f"exact 2D projection is defined for the ellipsoid model only, "
            f"not {model.variant.label}"
        )
    n = model.n
    for k in (i, j):
        if not 0 <= k < n:
            raise IndexOutOfRange(f"index {k} outside 0..{n - 1}")
    if i == j:
        raise IndexOutOfRange("projection plane needs two distinct indices")
    r = float(model.R.entries[i, j])
    return np.array([[1.0, r], [r, 1.0]])


def _flat(matrix: np.ndarray) -> list[float]:
    return [float(v) for v in np.asarray(matrix).ravel()]


def serialize(model: ConvexModel) -> str:
    """Render the model as JSON text; numbers keep shortest round-trip
    precision (at most 17 significant digits)."""
    doc: dict = {
        "format_version": FORMAT_VERSION,
        "variant": model.variant.value,
        "method": model.R.method,
        "names": list(model.spec.names),
        "lower": [iv.lower for iv in model.spec.intervals],
        "upper": [iv.upper for iv in model.spec.intervals],
        "correlation": _flat(model.R.entries),
    }
    if model.variant is ModelVariant.ME:
        doc["covariance"] = _flat(model.covariance)
    else:
        doc["shape"] = _flat(model.shape.entries)
    return json.dumps(doc, indent=2)


def _require(doc: dict, key: str, kind) -> object:
    if key not in doc:
        raise ParseError("missing key", field=key)
    value = doc[key]
    if kind is float:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif kind is list:
        ok = isinstance(value, list)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise ParseError(f"expected {getattr(kind, '__name__', kind)}", field=key)
    return value


def _matrix_from_flat(values: list, n: int, field: str) -> np.ndarray:
    if len(values) != n * n:
        raise ParseError(f"expected {n * n} row-major entries, got {len(values)}", field=field)
    try:
        return np.array([float(v) for v in values], dtype=float).reshape(n, n)
    except (TypeError, ValueError):
        raise ParseError("non-numeric matrix entry", field=field) from None


def deserialize(text: str) -> ConvexModel:
    """Parse a model file. Structural validation only: the shape matrix of
    a loaded MP model may carry print-rounded rows (absolute sums near but
    not exactly 1), so the strict row-sum invariant applies to built
    models, not to loaded ones."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("model file must contain a JSON object")
    version = _require(doc, "format_version", int)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version}", field="format_version")
    variant_tag = _require(doc, "variant", str)
    try:
        variant = ModelVariant(variant_tag)
    except ValueError:
        raise ParseError(f"unknown variant '{variant_tag}'", field="variant") from None
    method = _require(doc, "method", str)
    if method not in ("ccc", "scc"):
        raise ParseError(f"unknown method '{method}'", field="method")
    names = _require(doc, "names", list)
    lower = _require(doc, "lower", list)
    upper = _require(doc, "upper", list)
    if not (len(names) == len(lower) == len(upper)) or not names:
        raise ParseError("names/lower/upper lengths differ or are empty", field="names")
    n = len(names)
    try:
        spec = make_marginal_spec(
            (str(names[k]), float(lower[k]), float(upper[k])) for k in range(n)
        )
    except (TypeError, ValueError):
        raise ParseError("non-numeric interval bound", field="lower") from None
    corr = _matrix_from_flat(_require(doc, "correlation", list), n, "correlation")
    if np.max(np.abs(corr - corr.T)) > 1e-9:
        raise ParseError("correlation matrix not symmetric", field="correlation")
    if np.max(np.abs(np.diag(corr) - 1.0)) > 1e-9:
        raise ParseError("correlation diagonal must be 1", field="correlation")
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    try:
        R = CorrelationMatrix(
            entries=corr,
            method=method,
            variant=variant if method == "ccc" else None,
        )
    except ValueError as exc:
        raise ParseError(str(exc), field="correlation") from None

    radii = spec.radii
    if variant is ModelVariant.ME:
        covariance = _matrix_from_flat(_require(doc, "covariance", list), n, "covariance")
        rebuilt = R.entries * np.outer(radii, radii)
        scale = max(np.max(np.abs(covariance)), 1.0)
        if np.max(np.abs(covariance - rebuilt)) > 1e-9 * scale:
            raise ParseError(
                "covariance inconsistent with correlation and interval radii",
                field="covariance",
            )
        try:
            return build_model(variant, spec, R)
        except NotPositiveDefinite as exc:
            raise ParseError(str(exc), field="correlation") from None
    S = _matrix_from_flat(_require(doc, "shape", list), n, "shape")
    row_sums = np.sum(np.abs(S), axis=1)
    if np.max(np.abs(row_sums - 1.0)) > 0.05:
        raise ParseError("shape rows are not normalized to unit absolute sum", field="shape")
    if abs(np.linalg.det(S)) < 1e-14:
        raise ParseError("shape matrix is singular", field="shape")
    dx_shape = radii[:, None] * S
    characteristic = np.linalg.inv(dx_shape)
    return ConvexModel(
        variant=variant,
        spec=spec,
        R=R,
        shape=ShapeMatrix(entries=S, weights=1.0 / row_sums),
        characteristic=characteristic,
        covariance=None,
        cholesky=None,
        dx_shape=dx_shape,
    )


def save_model(path: str | Path, model: ConvexModel) -> None:
    Path(path).write_text(serialize(model) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ConvexModel:
    return deserialize(Path(path).read_text(encoding="utf-8"))
