"""Normalized trigonometric and hyperbolic B-splines."""

from .approx import FitProblem, FitReport, builtin_target, convergence_study, least_squares_fit, make_fit_knots
from .basis import (
    eval_normalized_by_definition,
    eval_normalized_recurrence,
    eval_unnormalized,
    tabulate_basis,
)
from .curves import CircleSpec, CurveModel, eval_curve, insert_knot, make_circle, make_circle_segment, make_curve
from .knots import BasisSpec, Family, KnotVector, is_uniform, multiplicity, parse_knots, validate
from .weights import (
    WeightSet,
    cardinalities,
    compute_weights,
    enumerate_signvectors,
    rho_table,
    weight_bruteforce_Q,
    weight_integral_check,
    weight_pruned_Qhat,
    weight_signvector,
    weight_uniform,
    weight_walz_check,
)

__version__ = "0.1.0"

__all__ = [
    "BasisSpec",
    "builtin_target",
    "cardinalities",
    "CircleSpec",
    "compute_weights",
    "convergence_study",
    "CurveModel",
    "enumerate_signvectors",
    "eval_curve",
    "eval_normalized_by_definition",
    "eval_normalized_recurrence",
    "eval_unnormalized",
    "Family",
    "FitProblem",
    "FitReport",
    "insert_knot",
    "is_uniform",
    "KnotVector",
    "least_squares_fit",
    "make_circle",
    "make_circle_segment",
    "make_curve",
    "make_fit_knots",
    "multiplicity",
    "parse_knots",
    "rho_table",
    "tabulate_basis",
    "validate",
    "weight_bruteforce_Q",
    "weight_integral_check",
    "weight_pruned_Qhat",
    "weight_signvector",
    "weight_uniform",
    "weight_walz_check",
    "WeightSet",
]
