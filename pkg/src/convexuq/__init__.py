"""Non-probabilistic convex uncertainty models for correlated interval
variables: a multidimensional ellipsoid and five parallelepiped variants,
fitted from small samples, with assessment indices, uniform domain
sampling, unbiasedness verification, and reliability-index computation.
"""

from . import errors
from .correlation import (
    CorrelationMatrix,
    ModelVariant,
    RepairReport,
    assemble_correlation_matrix,
    ccc_fit,
    ensure_positive_definite,
    fit_correlation_matrix,
    scc,
)
from .dataio import read_intervals_csv, read_samples_csv, write_samples_csv
from .domain import (
    Interval,
    MarginalSpec,
    RegularizedSamples,
    SampleSet,
    ValidationReport,
    deregularize,
    make_marginal_spec,
    regularize,
    validate_samples,
)
from .factorization import (
    CoreShapeMatrix,
    ShapeMatrix,
    cholesky_lower,
    core_shape_matrix,
    eigen_factor,
    identity_factor,
    shape_matrix,
    symmetric_sqrt,
    upper_factor,
)
from .models import (
    MEMBERSHIP_TOL,
    AssessmentReport,
    ConvexModel,
    Membership,
    build_model,
    contains,
    deserialize,
    fitness,
    load_model,
    membership_values,
    project_2d,
    save_model,
    serialize,
    volume_ratio,
)
from .reliability import (
    LimitState,
    ReliabilityOptions,
    ReliabilityResult,
    from_delta,
    parse_limit_state,
    reliability_index,
    to_delta,
)
from .sampling import (
    VERDICT_BIASED,
    VERDICT_UNBIASED,
    UnbiasednessReport,
    ccc_recovery_report,
    mc_volume,
    sample_uniform,
    verdict_tolerance,
    verify_unbiasedness,
)
from .svg import render_projection

__version__ = "0.1.0"

__all__ = [
    "errors",
    "Interval",
    "MarginalSpec",
    "SampleSet",
    "RegularizedSamples",
    "ValidationReport",
    "make_marginal_spec",
    "validate_samples",
    "regularize",
    "deregularize",
    "read_samples_csv",
    "write_samples_csv",
    "read_intervals_csv",
    "ModelVariant",
    "CorrelationMatrix",
    "RepairReport",
    "scc",
    "ccc_fit",
    "assemble_correlation_matrix",
    "ensure_positive_definite",
    "fit_correlation_matrix",
    "CoreShapeMatrix",
    "ShapeMatrix",
    "symmetric_sqrt",
    "identity_factor",
    "eigen_factor",
    "cholesky_lower",
    "upper_factor",
    "core_shape_matrix",
    "shape_matrix",
    "ConvexModel",
    "Membership",
    "MEMBERSHIP_TOL",
    "AssessmentReport",
    "build_model",
    "membership_values",
    "contains",
    "volume_ratio",
    "fitness",
    "project_2d",
    "serialize",
    "deserialize",
    "save_model",
    "load_model",
    "UnbiasednessReport",
    "VERDICT_UNBIASED",
    "VERDICT_BIASED",
    "verdict_tolerance",
    "sample_uniform",
    "mc_volume",
    "verify_unbiasedness",
    "ccc_recovery_report",
    "LimitState",
    "parse_limit_state",
    "ReliabilityOptions",
    "ReliabilityResult",
    "to_delta",
    "from_delta",
    "reliability_index",
    "render_projection",
    "__version__",
]
