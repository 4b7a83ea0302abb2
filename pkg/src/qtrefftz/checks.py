"""Invariant checks run by ``qtrefftz verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import Family
from .basis_eval import (assemble_matrix, faa_di_bruno_exp_taylor, numerical_rank, reference_matrix_E,
                         reference_matrix_R)
from .coefficients import OperatorCase, PdeCoefficients, builtin_operator, coefficients_from_flow
from .construct import build_basis, generate_directions, polynomial_seeds, construct_polynomial_qt
from .exact_solutions import CaseId, solution_taylor, test_case
from .operator_core import apply_operator_taylor, check_hypothesis, residual_magnitude, residual_scale
from .taylor import TaylorTable, taylor_product

_CENTER = (0.3, -0.2, 0.4)


@dataclass(frozen=True)
class Check:
    name: str
    tol: float
    description: str
    measure: Callable[[], float]
    passes: Callable[[float, float], bool] = lambda worst, tol: worst <= tol

    def run(self) -> tuple[bool, float]:
        worst = float(self.measure())
        return bool(self.passes(worst, self.tol)), worst


def _operators(order: int):
    return [builtin_operator(c, 2.0, 0.2, _CENTER, order) for c in OperatorCase]


def _perturbed(coeffs: PdeCoefficients, eps: float) -> PdeCoefficients:
    t = np.array(coeffs.tables)
    t[0, 0] += eps
    return PdeCoefficients(coeffs.center, coeffs.max_order, t)


def residual_check(perturb: float = 0.0, n_max: int = 4) -> float:
    """Worst scaled residual; bases are built from a perturbed operator when ``perturb`` != 0."""
    worst = 0.0
    for n in range(1, n_max + 1):
        q = max(n - 1, 1)
        for coeffs in _operators(q + 1):
            source = _perturbed(coeffs, perturb) if perturb else coeffs
            for fam in Family:
                for b in build_basis(source, n, fam):
                    worst = max(worst, residual_magnitude(coeffs, b) / residual_scale(coeffs, b))
    return worst


def plane_wave_check() -> float:
    coeffs = builtin_operator(OperatorCase.HELMHOLTZ_CONST, 3.0, center=_CENTER, max_order=6)
    worst = 0.0
    for fam in (Family.AMPLITUDE, Family.PHASE):
        for b in build_basis(coeffs, 5, fam, s=3j):
            computed = np.array(b.poly)
            computed[0] = 0.0
            if fam is Family.PHASE:
                computed[1:4] = 0.0
            worst = max(worst, float(np.max(np.abs(computed))))
    return worst


def rank_check(n_max: int = 4) -> float:
    """Number of rank deficits summed over families, operators and n."""
    deficit = 0
    for n in range(1, n_max + 1):
        p = (n + 1) ** 2
        dirs = generate_directions(n)
        for coeffs in _operators(max(n - 1, 1) + 1):
            st = check_hypothesis(coeffs)
            mats = [assemble_matrix(build_basis(coeffs, n, f), n) for f in Family]
            mats += [reference_matrix_E(n, dirs, 2j, st.P, st.D), reference_matrix_R(n, dirs)]
            deficit += sum(abs(numerical_rank(m) - p) for m in mats)
    return float(deficit)


def polynomial_dimension_check(q_max: int = 5) -> float:
    deficit = 0
    for q in range(1, q_max + 1):
        coeffs = builtin_operator(OperatorCase.CONVECTED_AIRY, 2.0, 0.2, _CENTER, q + 1)
        cols = np.column_stack([construct_polynomial_qt(coeffs, q, s).poly for s in polynomial_seeds(q)])
        deficit += abs(numerical_rank(cols) - (q + 2) ** 2)
    return float(deficit)


def faa_di_bruno_check(seed: int = 7) -> float:
    from .basis import BasisFunction
    from .basis_eval import taylor_table

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        poly = np.zeros(20, dtype=complex)
        poly[1:] = 0.5 * (rng.normal(size=19) + 1j * rng.normal(size=19))
        b = BasisFunction(Family.PHASE, _CENTER, 2, poly)
        fast = taylor_table(b, 4).coeffs
        ref = faa_di_bruno_exp_taylor(TaylorTable(_CENTER, 4, np.r_[poly, np.zeros(15)]), 4).coeffs
        worst = max(worst, float(np.max(np.abs(fast - ref)) / np.max(np.abs(ref))))
    return worst


def product_check(seed: int = 11) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for order in range(0, 6):
        a = TaylorTable(_CENTER, order, rng.normal(size=_count(order)) + 1j * rng.normal(size=_count(order)))
        b = TaylorTable(_CENTER, order, rng.normal(size=_count(order)))
        fast = taylor_product(a, b).as_dict()
        ref = {}
        for i, u in a.as_dict().items():
            for j, v in b.as_dict().items():
                k = (i[0] + j[0], i[1] + j[1], i[2] + j[2])
                if sum(k) <= order:
                    ref[k] = ref.get(k, 0) + u * v
        worst = max(worst, max(abs(fast[k] - ref[k]) for k in ref))
    return worst


def _count(order: int) -> int:
    return (order + 1) * (order + 2) * (order + 3) // 6


def exact_solution_check() -> float:
    worst = 0.0
    for case in CaseId:
        tc = test_case(case)
        for c in tc.centers(5):
            u = solution_taylor(tc, c, 10)
            worst = max(worst, apply_operator_taylor(tc.operator(c, 8), u, 8).max_abs())
    return worst


def flow_determinant_check(samples: int = 200, seed: int = 3) -> float:
    """Largest principal-part determinant over random subsonic flows (must be < 0)."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(samples):
        v = rng.normal(size=3)
        m = v / np.linalg.norm(v) * rng.uniform(0, 0.999)
        tabs = [TaylorTable.constant(_CENTER, 1, x) for x in (1.0, *m)]
        st = check_hypothesis(coefficients_from_flow(*tabs, kappa=2.0))
        worst = max(worst, float(np.linalg.det(st.C)))
    return worst


def default_suite(perturb: float = 0.0) -> list:
    return [
        Check("residual", 1e-10, "quasi-Trefftz residual of every basis function, n <= 4",
              lambda: residual_check(perturb)),
        Check("plane-wave-reduction", 1e-13, "GPWs of Lap + k^2 with s = ik are plane waves", plane_wave_check),
        Check("rank", 0.0, "rank (n+1)^2 of A, P, Q, E, R matrices, n <= 4", rank_check),
        Check("polynomial-dimension", 0.0, "(q+2)^2 independent canonical polynomials, q <= 5",
              polynomial_dimension_check),
        Check("faa-di-bruno", 1e-11, "series exponential vs Faa di Bruno, |i| <= 4", faa_di_bruno_check),
        Check("taylor-product", 1e-12, "truncated product vs direct expansion, order <= 5", product_check),
        Check("exact-solutions", 1e-11, "test-case solutions annihilated by their operators",
              exact_solution_check),
        Check("flow-determinant", 0.0, "det of principal part < 0 for subsonic flows", flow_determinant_check,
              passes=lambda worst, tol: worst < tol),
    ]
