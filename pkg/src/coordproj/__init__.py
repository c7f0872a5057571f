"""Coordinate-projection geometry toolkit.

Orlicz psi_p norms, Bernoulli-selector projections, rotation-based
dimension reduction, exact shattering dimension, covering and packing
numbers, and Monte-Carlo complexity averages, all at desk scale with
reproducible seeding.
"""

__version__ = "0.1.0"

from .core import (
    CoordinateSubset,
    CoordprojError,
    FittedConstant,
    FunctionClass,
    InputError,
    RngStream,
    SizeCapError,
    as_vector,
    banach_norm,
    digest_inputs,
    normalized_lp,
    project,
    project_class,
)
from .orlicz import PsiNormResult, psi_norm, psi_power_identity_check, tail_to_psi2_bound
from .selector import (
    SelectorDraw,
    TailExperimentReport,
    almost_isometry_experiment,
    chernoff_tail_bound,
    draw_selectors,
    exact_log_mgf,
    exact_mgf,
    exact_tail_probability,
    tail_experiment,
)
from .rotation import (
    DEFAULT_JL_CONSTANT,
    DistortionReport,
    coordinate_jl,
    distortion_report,
    fit_jl_constant,
    haar_orthogonal,
    rotated_psi2_tail,
    scaled_basis,
)
from .shatter import (
    DominationResult,
    ShatterWitness,
    VcResult,
    dual_ball_class,
    is_shattered,
    l1_domination,
    vc_convex_hull,
    vc_dimension,
    verify_witness,
)
from .entropy import (
    CoveringEstimate,
    EntropyAudit,
    EntropyAuditRow,
    covering_estimate,
    covering_number_upper,
    entropy_inequality_audit,
    packing_number,
    pairwise_l2_distances,
)
from .complexity import (
    ComplexityEstimate,
    EntropyIntegralAudit,
    SignMinimumResult,
    TParameterResult,
    TypeComparisonRow,
    TypeInfratypeReport,
    ell_parameter,
    entropy_integral_audit,
    fit_gaussian_rademacher_ratio,
    gaussian_complexity,
    min_sign_norm,
    rademacher_complexity,
    t_parameter,
    type_infratype_report,
)

__all__ = [
    "__version__",
    "CoordinateSubset",
    "CoordprojError",
    "FittedConstant",
    "FunctionClass",
    "InputError",
    "RngStream",
    "SizeCapError",
    "as_vector",
    "banach_norm",
    "digest_inputs",
    "normalized_lp",
    "project",
    "project_class",
    "PsiNormResult",
    "psi_norm",
    "psi_power_identity_check",
    "tail_to_psi2_bound",
    "SelectorDraw",
    "TailExperimentReport",
    "almost_isometry_experiment",
    "chernoff_tail_bound",
    "draw_selectors",
    "exact_log_mgf",
    "exact_mgf",
    "exact_tail_probability",
    "tail_experiment",
    "DEFAULT_JL_CONSTANT",
    "DistortionReport",
    "coordinate_jl",
    "distortion_report",
    "fit_jl_constant",
    "haar_orthogonal",
    "rotated_psi2_tail",
    "scaled_basis",
    "DominationResult",
    "ShatterWitness",
    "VcResult",
    "dual_ball_class",
    "is_shattered",
    "l1_domination",
    "vc_convex_hull",
    "vc_dimension",
    "verify_witness",
    "CoveringEstimate",
    "EntropyAudit",
    "EntropyAuditRow",
    "covering_estimate",
    "covering_number_upper",
    "entropy_inequality_audit",
    "packing_number",
    "pairwise_l2_distances",
    "ComplexityEstimate",
    "EntropyIntegralAudit",
    "SignMinimumResult",
    "TParameterResult",
    "TypeComparisonRow",
    "TypeInfratypeReport",
    "ell_parameter",
    "entropy_integral_audit",
    "fit_gaussian_rademacher_ratio",
    "gaussian_complexity",
    "min_sign_norm",
    "rademacher_complexity",
    "t_parameter",
    "type_infratype_report",
]
