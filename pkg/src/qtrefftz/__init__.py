"""Quasi-Trefftz bases for second-order operators with variable coefficients in 3D."""

from .basis import BasisFunction, Family
from .coefficients import OperatorCase, PdeCoefficients, builtin_operator, coefficients_from_flow
from .construct import (
    build_basis,
    construct_amplitude_gpw,
    construct_phase_gpw,
    construct_polynomial_qt,
    generate_directions,
    solve_subsystem,
)
from .multiindex import MultiIndex, compare_prec, layer, numbering
from .operator_core import HypothesisViolation, apply_operator_taylor, check_hypothesis, residual_magnitude
from .taylor import TaylorTable, taylor_product

__all__ = [
    "BasisFunction", "Family", "OperatorCase", "PdeCoefficients", "builtin_operator",
    "coefficients_from_flow", "build_basis", "construct_amplitude_gpw", "construct_phase_gpw",
    "construct_polynomial_qt", "generate_directions", "solve_subsystem", "MultiIndex",
    "compare_prec", "layer", "numbering", "HypothesisViolation", "apply_operator_taylor",
    "check_hypothesis", "residual_magnitude", "TaylorTable", "taylor_product",
]
