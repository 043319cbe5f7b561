"""Analysis of metric rescaling limits at a marked point.

Given a pointed metric space, this package estimates whether the limits
obtained by rescaling distances along a vanishing sequence are unique,
builds finite approximations of those limit spaces, constructs oscillating
witnesses when uniqueness fails, and checks whether limits survive passage
to subsequences.  Exact spaces (subsets of the line, crossing rays, the
ternary set) are handled in rational arithmetic end to end; sampled spaces
(curves, regions, rotation bodies) run on controlled float grids.
"""

__version__ = "0.1.0"

from .core import (
    InvalidPointError,
    MetricAuditReport,
    MetricSpaceError,
    Point,
    RadiusProbe,
    SamplingContractError,
    SpaceOracle,
    SphereSample,
    distance,
    metric_audit,
    radius_probe,
    sphere_sample,
)
from .ternary import (
    DEFAULT_MEMBERSHIP_DEPTH,
    MembershipVerdict,
    NonTerminatingExpansionError,
    TernaryError,
    TernaryNumber,
    TruncationBudgetError,
    cantor_max_leq,
    cantor_min_geq,
    ce_truncation,
    is_cantor,
    is_extended_cantor,
    scale3,
    ternary_from_value,
    ternary_value,
)
from .spaces import (
    CantorSpace,
    CurveFamily,
    DegenerateRayError,
    HalfLine,
    FiniteSubsetSpace,
    LacunaryParams,
    LacunarySpace,
    LineLikeSpace,
    PlanarRays,
    PolynomialCurve,
    Ray,
    RegionBetweenGraphs,
    RotationBody,
    SPACE_KINDS,
    SpaceSpec,
    SpaceValidationError,
    build_space,
    curve_tangent_ray,
    planar_ray_pair,
    sqrt_fraction,
)
from .limits import (
    DEFAULT_WINDOW,
    LimitEstimate,
    estimate_limit,
)
from .functionals import (
    CannotEvaluateError,
    ConditionReport,
    EquivalenceReport,
    FunctionalError,
    InsufficientGridError,
    NotInRadiusSetError,
    ReportMismatchError,
    SpherePair,
    UniquenessVerdict,
    annulus_diameter,
    default_r_grid,
    default_tol_abs,
    condition_i,
    condition_ii,
    condition_iii,
    sphere_gap,
    tangent_equivalence_epsilon,
    uniqueness_verdict,
)
from .stability import (
    DEFAULT_DEPTH,
    FinitePretangent,
    InsufficientDepthError,
    KappaReport,
    NonSelfStableError,
    NonuniquenessWitness,
    NormalizingSequence,
    NoValueError,
    PointSequence,
    StabilityAudit,
    StabilityError,
    TangencyReport,
    UnsupportedSpaceError,
    WitnessNotFoundError,
    candidate_library,
    constant_sequence,
    default_quotient_tol,
    dtilde,
    interleave_witness,
    kappa_cross_check,
    make_selector,
    mutually_stable,
    nonuniqueness_witness,
    points_from_list,
    pretangent_approximation,
    tangency_check,
    transitivity_audit,
    value_map,
)
from .config import AnalysisConfig, ConfigError, parse_config
from .analyzer import Report, emit_outputs, run_analysis

__all__ = [
    "AnalysisConfig",
    "CannotEvaluateError",
    "CantorSpace",
    "ConditionReport",
    "ConfigError",
    "CurveFamily",
    "DEFAULT_DEPTH",
    "DEFAULT_MEMBERSHIP_DEPTH",
    "DEFAULT_WINDOW",
    "DegenerateRayError",
    "EquivalenceReport",
    "FinitePretangent",
    "FiniteSubsetSpace",
    "FunctionalError",
    "HalfLine",
    "InsufficientDepthError",
    "InsufficientGridError",
    "InvalidPointError",
    "KappaReport",
    "LacunaryParams",
    "LacunarySpace",
    "LimitEstimate",
    "LineLikeSpace",
    "MetricAuditReport",
    "MetricSpaceError",
    "NonSelfStableError",
    "NonuniquenessWitness",
    "NormalizingSequence",
    "NotInRadiusSetError",
    "ReportMismatchError",
    "NoValueError",
    "PlanarRays",
    "Point",
    "PointSequence",
    "PolynomialCurve",
    "RadiusProbe",
    "Ray",
    "RegionBetweenGraphs",
    "Report",
    "RotationBody",
    "SPACE_KINDS",
    "SamplingContractError",
    "SpaceOracle",
    "SpaceSpec",
    "SpaceValidationError",
    "SpherePair",
    "SphereSample",
    "StabilityAudit",
    "StabilityError",
    "TangencyReport",
    "MembershipVerdict",
    "NonTerminatingExpansionError",
    "TernaryError",
    "TernaryNumber",
    "TruncationBudgetError",
    "UniquenessVerdict",
    "UnsupportedSpaceError",
    "WitnessNotFoundError",
    "annulus_diameter",
    "build_space",
    "candidate_library",
    "cantor_max_leq",
    "cantor_min_geq",
    "ce_truncation",
    "condition_i",
    "condition_ii",
    "condition_iii",
    "constant_sequence",
    "curve_tangent_ray",
    "default_quotient_tol",
    "default_r_grid",
    "default_tol_abs",
    "distance",
    "dtilde",
    "emit_outputs",
    "estimate_limit",
    "interleave_witness",
    "is_cantor",
    "is_extended_cantor",
    "kappa_cross_check",
    "make_selector",
    "metric_audit",
    "mutually_stable",
    "nonuniqueness_witness",
    "parse_config",
    "planar_ray_pair",
    "points_from_list",
    "pretangent_approximation",
    "radius_probe",
    "run_analysis",
    "scale3",
    "sphere_gap",
    "sphere_sample",
    "sqrt_fraction",
    "tangency_check",
    "tangent_equivalence_epsilon",
    "ternary_from_value",
    "ternary_value",
    "transitivity_audit",
    "uniqueness_verdict",
    "value_map",
]
