"""Numerical verification of the Cassels product bound and its extremal configurations."""

__version__ = "0.1.0"

from .analytic import (
    AnalyticPair,
    PolynomialCoefficients,
    QuadratureGrid,
    blaschke_eval,
    build_PQR,
    circle_mean,
    elementary_symmetric,
    f_eval,
    verify_cauchy_identities,
    verify_coefficient_relations,
    verify_equality_function,
)
from .core import (
    BoundParams,
    Check,
    DiscConfiguration,
    TorusConfiguration,
    VerificationReport,
    alexander_condition,
    cassels_condition,
    cassels_log_bound,
    dubickas_factorization_check,
    full_product_with_diagonal,
    log_pairwise_product,
    log_pairwise_product_equiv_form,
    verify_main_inequality,
)
from .errors import BoundViolation, DegenerateFactor, InvalidParam, NoConvergence, PoleProximity
from .monotonicity import (
    AdditiveReport,
    PotentialCurve,
    additive_sum,
    corollary_sum,
    g_derivative,
    g_value,
    scan_monotonicity,
    verify_additive_inequality,
)
from .search import (
    OptimizationResult,
    SymmetricSearchRecord,
    detect_regular_ngon,
    optimize_torus,
    push_to_boundary,
    symmetric_function_search,
    torus_gradient,
    torus_log_objective,
)
