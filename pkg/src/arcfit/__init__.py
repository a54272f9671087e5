"""Constrained polynomial approximation on circle arcs.

Best L2 approximation of boundary data on a union of arcs I by a fixed
degree polynomial whose modulus is bounded on the complementary arcs J,
solved through the concave Lagrangian dual with KKT certification.
"""

from .arcs import (
    ArcSystem,
    ConstraintGrid,
    FrequencyMap,
    build_constraint_grid,
    map_frequencies,
    wrap_angle,
)
from .certify import (
    Certificate,
    certify,
    certify_result,
    certify_sup_norm,
    check_multiplier_bound,
    check_stationarity,
    extract_extremal_points,
)
from .dual import (
    DualState,
    SolveOptions,
    SolveResult,
    inner_minimize,
    maximize_dual,
    monomial_matrix,
    primal_value,
)
from .estimator import BoundedPolynomialApproximator
from .ingest import SyntheticCase, generate_synthetic, load_measurements, save_measurements
from .moments import (
    GramConditioningError,
    MomentVector,
    SampledBoundaryData,
    exact_polynomial_moments,
    factor_gram,
    gram_closed_form,
    gram_from_samples,
    moments_from_samples,
)
from .sweep import ProblemSetup, SweepReport, sweep_m, sweep_n

__version__ = "0.1.0"

__all__ = [
    "ArcSystem",
    "BoundedPolynomialApproximator",
    "Certificate",
    "ConstraintGrid",
    "DualState",
    "FrequencyMap",
    "GramConditioningError",
    "MomentVector",
    "ProblemSetup",
    "SampledBoundaryData",
    "SolveOptions",
    "SolveResult",
    "SweepReport",
    "SyntheticCase",
    "build_constraint_grid",
    "certify",
    "certify_result",
    "certify_sup_norm",
    "check_multiplier_bound",
    "check_stationarity",
    "exact_polynomial_moments",
    "extract_extremal_points",
    "factor_gram",
    "generate_synthetic",
    "gram_closed_form",
    "gram_from_samples",
    "inner_minimize",
    "load_measurements",
    "map_frequencies",
    "maximize_dual",
    "moments_from_samples",
    "monomial_matrix",
    "primal_value",
    "save_measurements",
    "sweep_m",
    "sweep_n",
    "wrap_angle",
]
