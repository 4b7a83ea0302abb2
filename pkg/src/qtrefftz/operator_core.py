"""Principal-part checks and the Taylor-table residual oracle.

The oracle here never looks at the layer formulas used for construction: it
applies the operator through derivative shifts and truncated products of
tables, so agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisFunction, Family
from .coefficients import OPERATOR_INDICES, PdeCoefficients
from .multiindex import IDX_2E, IDX_CROSS, IDX_E, PAIRS, count_upto
from .taylor import TaylorTable

HYPOTHESIS_RTOL = 1e-12


class HypothesisViolation(ValueError):
    """The principal part at the center cannot drive the layer-by-layer construction."""


@dataclass(frozen=True)
class SecondOrderStructure:
    C: np.ndarray
    P: np.ndarray
    D: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.D).copy()

    def seed_matrix(self, s: complex) -> np.ndarray:
        """``s * P * D^{-1/2}`` (complex square root when an eigenvalue is negative)."""
        return s * self.P @ np.diag(1.0 / np.sqrt(self.eigenvalues.astype(np.complex128)))


def principal_matrix(coeffs: PdeCoefficients) -> np.ndarray:
    """Symmetric 3x3 matrix of second-order coefficient values at the center (complex)."""
    p = coeffs.principal()
    C = np.diag(p[:3]).astype(np.complex128)
    for (k, kp), v in zip(PAIRS, p[3:]):
        C[k, kp] = C[kp, k] = 0.5 * v
    return C


def check_hypothesis(coeffs: PdeCoefficients) -> SecondOrderStructure:
    C = principal_matrix(coeffs)
    scale = float(np.max(np.abs(C)))
    if scale == 0.0:
        raise HypothesisViolation("operator has no second-order part at the center")
    tol = HYPOTHESIS_RTOL * scale
    if np.max(np.abs(C.imag)) > tol:
        raise HypothesisViolation("principal coefficients must be real at the center")
    C = C.real.copy()
    if abs(C[0, 0]) <= tol:
        raise HypothesisViolation("the d11 coefficient vanishes at the center")
    det = float(np.linalg.det(C))
    if abs(det) <= HYPOTHESIS_RTOL * scale**3:
        raise HypothesisViolation(f"principal matrix is singular (det = {det:.3e})")
    w, P = np.linalg.eigh(C)
    return SecondOrderStructure(C, P, np.diag(w))


def apply_operator_taylor(coeffs: PdeCoefficients, f: TaylorTable, out_order: int) -> TaylorTable:
    """Table of ``L f`` at the center up to ``out_order``."""
    if f.order < out_order + 2:
        raise ValueError(f"need a table of order >= {out_order + 2}, got {f.order}")
    if coeffs.max_order < out_order:
        raise ValueError(f"need coefficient tables of order >= {out_order}, got {coeffs.max_order}")
    if not np.array_equal(coeffs.center, f.center):
        raise ValueError("operator and table have different centers")
    ops = coeffs.truncate(out_order)
    f = f.truncate(out_order + 2)
    out = TaylorTable.zeros(f.center, out_order)
    for j in OPERATOR_INDICES:
        c = ops.table(j)
        if not np.any(c.coeffs):
            continue
        out = out + c * f.derivative(j).truncate(out_order)
    return out


def conjugate_amplitude(coeffs: PdeCoefficients, lam) -> PdeCoefficients:
    """Coefficients of ``exp(-lam.x) L exp(lam.x)``, i.e. ``d_k -> d_k + lam_k``."""
    lam = np.asarray(lam, dtype=np.complex128)
    t = np.array(coeffs.tables)
    out = t.copy()
    for k in range(3):
        out[IDX_E[k]] = t[IDX_E[k]] + 2 * lam[k] * t[IDX_2E[k]]
        out[0] += lam[k] * t[IDX_E[k]] + lam[k] ** 2 * t[IDX_2E[k]]
    for p, (k, kp) in enumerate(PAIRS):
        out[IDX_E[k]] += lam[kp] * t[IDX_CROSS[p]]
        out[IDX_E[kp]] += lam[k] * t[IDX_CROSS[p]]
        out[0] += lam[k] * lam[kp] * t[IDX_CROSS[p]]
    return PdeCoefficients(coeffs.center, coeffs.max_order, out)


def apply_phase_operator_taylor(coeffs: PdeCoefficients, p: TaylorTable, out_order: int) -> TaylorTable:
    """Table of ``exp(-P) L exp(P)`` built from first and second derivatives of P."""
    if p.order < out_order + 2:
        raise ValueError(f"need a table of order >= {out_order + 2}, got {p.order}")
    ops = coeffs.truncate(out_order)
    p = p.truncate(out_order + 2)
    e = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    grad = [p.derivative(e[k]).truncate(out_order) for k in range(3)]
    out = TaylorTable(p.center, out_order, ops.tables[0])
    for k in range(3):
        c = TaylorTable(p.center, out_order, ops.tables[IDX_2E[k]])
        hess = p.derivative(tuple(2 * v for v in e[k]))
        out = out + c * (hess + grad[k] * grad[k])
        out = out + TaylorTable(p.center, out_order, ops.tables[IDX_E[k]]) * grad[k]
    for q, (k, kp) in enumerate(PAIRS):
        c = TaylorTable(p.center, out_order, ops.tables[IDX_CROSS[q]])
        mixed = p.derivative(tuple(a + b for a, b in zip(e[k], e[kp])))
        out = out + c * (mixed + grad[k] * grad[kp])
    return out


def residual_table(coeffs: PdeCoefficients, b: BasisFunction, q: int | None = None) -> TaylorTable:
    """Table of the conjugated residual up to order ``q - 1`` (empty when ``q == 0``)."""
    q = b.q if q is None else q
    if q < 1:
        raise ValueError("residual order q must be >= 1")
    if not np.array_equal(coeffs.center, b.center):
        raise ValueError("basis function and operator have different centers")
    table = b.polynomial_table()
    if table.order < q + 1:
        table = TaylorTable(table.center, q + 1,
                            np.concatenate([table.coeffs, np.zeros(count_upto(q + 1) - count_upto(table.order))]))
    if b.family is Family.POLYNOMIAL:
        return apply_operator_taylor(coeffs, table, q - 1)
    if b.family is Family.AMPLITUDE:
        return apply_operator_taylor(conjugate_amplitude(coeffs, b.lam), table, q - 1)
    return apply_phase_operator_taylor(coeffs, table, q - 1)


def residual_magnitude(coeffs: PdeCoefficients, b: BasisFunction, q: int | None = None) -> float:
    """``max_{|beta| < q} |T_{L b}[beta]|`` evaluated on the polynomial part (exponential factored out)."""
    return float(np.max(np.abs(residual_table(coeffs, b, q).coeffs)))


def residual_scale(coeffs: PdeCoefficients, b: BasisFunction) -> float:
    """Floating-point size of the terms that cancel in the residual.

    Product of the largest (conjugated) coefficient entry and the largest
    polynomial coefficient, floored at one.
    """
    ops = conjugate_amplitude(coeffs, b.lam) if b.family is Family.AMPLITUDE else coeffs
    if b.family is Family.PHASE:
        grad = float(np.max(np.abs(b.poly[1:]))) if b.poly.size > 1 else 0.0
        poly_scale = max(1.0, grad) ** 2
    else:
        poly_scale = max(1.0, float(np.max(np.abs(b.poly))))
    return max(1.0, ops.scale()) * poly_scale
