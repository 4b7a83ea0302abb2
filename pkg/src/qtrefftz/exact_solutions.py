"""Closed-form solutions of the three reference problems.

TC1: ``exp(i kappa y)`` for the constant Helmholtz operator.
TC2: ``Ai(kappa^(2/3) x) exp(i kappa (y+z)/sqrt 2)`` for ``Lap + kappa^2 (1-x)``.
TC3: ``Ai(a z) exp(i kappa (-M0 z/(1-M0^2) + (x+y)/sqrt(2-2M0^2)))``, ``a^3 = kappa^2/(1-M0^2)``,
     for the convected operator whose zeroth-order coefficient is ``kappa^2 (1-z)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from math import factorial, sqrt

import numpy as np

from .airy import airy_derivs, airy_pair
from .coefficients import OperatorCase, PdeCoefficients, builtin_operator
from .multiindex import index_set
from .taylor import TaylorTable, _as_center

CENTER_SEED = 0x5EED


class CaseId(str, Enum):
    TC1 = "tc1"
    TC2 = "tc2"
    TC3 = "tc3"


_OPERATOR = {
    CaseId.TC1: OperatorCase.HELMHOLTZ_CONST,
    CaseId.TC2: OperatorCase.HELMHOLTZ_AIRY,
    CaseId.TC3: OperatorCase.CONVECTED_AIRY,
}


@dataclass(frozen=True)
class TestCase:
    id: CaseId
    kappa: float
    mach: float = 0.0
    box: tuple = field(default=((-2.0, 2.0),) * 3)

    __test__ = False  # not a pytest class

    def operator(self, center, max_order: int) -> PdeCoefficients:
        return builtin_operator(_OPERATOR[self.id], self.kappa, self.mach, center, max_order)

    def centers(self, count: int, seed: int = CENTER_SEED) -> np.ndarray:
        """Uniform random points in the box, deterministic in ``seed``."""
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return lo + (hi - lo) * rng.random((count, 3))

    def with_params(self, **kw) -> TestCase:
        return replace(self, **kw)

    # per-axis data: (airy scale or None, exponential rate) for x, y, z
    def _axes(self):
        k = self.kappa
        if self.id is CaseId.TC1:
            return ((None, 0.0), (None, 1j * k), (None, 0.0))
        if self.id is CaseId.TC2:
            r = 1j * k / sqrt(2)
            return ((k ** (2 / 3), 0.0), (None, r), (None, r))
        m = self.mach
        beta2 = 1 - m * m
        r = 1j * k / sqrt(2 * beta2)
        return ((None, r), (None, r), ((k * k / beta2) ** (1 / 3), -1j * k * m / beta2))


def test_case(case, **overrides) -> TestCase:
    case = case if isinstance(case, CaseId) else CaseId(str(case).lower())
    base = {
        CaseId.TC1: TestCase(CaseId.TC1, 3.0, box=((-1.0, 1.0), (0.0, 2 * np.pi), (-1.0, 1.0))),
        CaseId.TC2: TestCase(CaseId.TC2, 2.0),
        CaseId.TC3: TestCase(CaseId.TC3, 2.0, mach=0.2),
    }[case]
    return replace(base, **overrides) if overrides else base


test_case.__test__ = False  # keep pytest from collecting the factory


def _factor_values(axis, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of one separable factor along ``x``."""
    scale, rate = axis
    e = np.exp(rate * x)
    if scale is None:
        return e, rate * e
    ai, aip = airy_pair(scale * x)
    return ai * e, (scale * aip + rate * ai) * e


def solution_values(tc: TestCase, x) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.ones(pts.shape[0], dtype=np.complex128)
    for k, axis in enumerate(tc._axes()):
        out = out * _factor_values(axis, pts[:, k])[0]
    return out


def solution_gradients(tc: TestCase, x) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    f = [_factor_values(axis, pts[:, k]) for k, axis in enumerate(tc._axes())]
    g = np.empty((pts.shape[0], 3), dtype=np.complex128)
    g[:, 0] = f[0][1] * f[1][0] * f[2][0]
    g[:, 1] = f[0][0] * f[1][1] * f[2][0]
    g[:, 2] = f[0][0] * f[1][0] * f[2][1]
    return g


def solution_value(tc: TestCase, x) -> complex:
    return complex(solution_values(tc, x)[0])


def solution_gradient(tc: TestCase, x) -> np.ndarray:
    return solution_gradients(tc, x)[0]


def _factor_taylor(axis, x0: float, order: int) -> np.ndarray:
    scale, rate = axis
    fact = np.array([factorial(k) for k in range(order + 1)], dtype=float)
    e = np.exp(rate * x0) * np.asarray(rate, dtype=complex) ** np.arange(order + 1) / fact
    if scale is None:
        return e
    a = airy_derivs(scale * x0, order) * scale ** np.arange(order + 1) / fact
    return np.convolve(a, e)[: order + 1]


def solution_taylor(tc: TestCase, center, order: int) -> TaylorTable:
    if order > 12 or order < 0:
        raise ValueError("solution tables are provided for orders 0..12")
    c = _as_center(center)
    f = [_factor_taylor(axis, c[k], order) for k, axis in enumerate(tc._axes())]
    mi = index_set(order).mi
    return TaylorTable(c, order, f[0][mi[:, 0]] * f[1][mi[:, 1]] * f[2][mi[:, 2]])
