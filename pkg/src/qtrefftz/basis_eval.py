"""Point evaluation, Taylor tables at the center and the coefficient matrices."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import _kernels
from .basis import BasisFunction, Family
from .multiindex import count_upto, index_set
from .taylor import TaylorTable

RANK_RTOL = 1e-8


def _displacements(b: BasisFunction, x, displaced: bool) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    return np.ascontiguousarray(pts if displaced else pts - b.center)


def _poly(cube: np.ndarray, dx: np.ndarray) -> np.ndarray:
    return _kernels.horner3(np.ascontiguousarray(cube), dx)


def _cube_derivative(cube: np.ndarray, axis: int) -> np.ndarray:
    n = cube.shape[axis]
    if n == 1:
        return np.zeros_like(cube)
    w = np.arange(1, n, dtype=float)
    shape = [1, 1, 1]
    shape[axis] = n - 1
    return np.take(cube, np.arange(1, n), axis=axis) * w.reshape(shape)


def evaluate_many(b: BasisFunction, x, displaced: bool = False) -> np.ndarray:
    """Values at each row of ``x``; with ``displaced`` the rows are ``x - x_C`` already."""
    dx = _displacements(b, x, displaced)
    val = _poly(b.coefficient_cube(), dx)
    if b.family is Family.AMPLITUDE:
        return val * np.exp(dx @ b.lam)
    if b.family is Family.PHASE:
        return np.exp(val)
    return val


def evaluate(b: BasisFunction, x) -> complex:
    return complex(evaluate_many(b, x)[0])


def gradient_many(b: BasisFunction, x, displaced: bool = False) -> np.ndarray:
    """Gradients, shape ``(len(x), 3)``."""
    dx = _displacements(b, x, displaced)
    cube = b.coefficient_cube()
    grad = np.stack([_poly(_cube_derivative(cube, k), dx) for k in range(3)], axis=1)
    if b.family is Family.POLYNOMIAL:
        return grad
    val = _poly(cube, dx)
    if b.family is Family.PHASE:
        return grad * np.exp(val)[:, None]
    e = np.exp(dx @ b.lam)
    return (grad + val[:, None] * b.lam[None, :]) * e[:, None]


def evaluate_gradient(b: BasisFunction, x) -> np.ndarray:
    return gradient_many(b, x)[0]


def taylor_table(b: BasisFunction, order: int) -> TaylorTable:
    """Table of ``b`` at its center.

    Amplitude functions use the Leibniz product with ``exp(lam . x)``; phase
    functions exponentiate the polynomial table as a truncated power series.
    Both are exact at any order since the polynomial parts are finite.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    poly = np.zeros(count_upto(order), dtype=np.complex128)
    k = min(poly.size, b.poly.size)
    poly[:k] = b.poly[:k]
    if b.family is Family.POLYNOMIAL:
        return TaylorTable(b.center, order, poly)
    if b.family is Family.AMPLITUDE:
        return TaylorTable(b.center, order, poly) * TaylorTable.exp_linear(b.center, order, b.lam)
    idx = index_set(order)
    return TaylorTable(b.center, order, _kernels.exp_series(poly, idx.mi, idx.lookup, idx.count))


def _partitions(target: tuple, parts: list, start: int):
    """Yield lists of (l, k) with distinct l from ``parts[start:]`` and ``sum k l = target``."""
    if not any(target):
        yield []
        return
    for t in range(start, len(parts)):
        l = parts[t]
        k = 1
        while all(l[c] * k <= target[c] for c in range(3)):
            rest = tuple(target[c] - k * l[c] for c in range(3))
            for tail in _partitions(rest, parts, t + 1):
                yield [(l, k)] + tail
            k += 1


def faa_di_bruno_exp_taylor(p: TaylorTable, order: int) -> TaylorTable:
    """Table of ``exp(P)`` by the multivariate Faa di Bruno formula (slow; reference only).

    With ``f = exp`` every outer derivative equals ``exp(P(x_C))`` and
    ``d^l P / l! = T_P[l]``, so ``T[i] = exp(T_P[0]) * sum prod T_P[l_m]^k_m / k_m!``
    over all ways to write ``i`` as ``sum k_m l_m`` with distinct nonzero ``l_m``.
    """
    if order > p.order:
        raise ValueError("order exceeds the table of P")
    idx = index_set(order)
    base = np.exp(p.coeffs[0])
    out = np.zeros(idx.count, dtype=np.complex128)
    for t, i in enumerate(idx.mi):
        i = tuple(int(v) for v in i)
        parts = [tuple(int(v) for v in l) for l in idx.mi[1:] if all(l[c] <= i[c] for c in range(3))]
        acc = 0j
        for part in _partitions(i, parts, 0):
            term = 1 + 0j
            for l, k in part:
                term *= p[l] ** k / factorial(k)
            acc += term
        out[t] = base * acc
    return TaylorTable(p.center, order, out)


@dataclass(frozen=True)
class BasisMatrix:
    """Rows indexed by the numbering of ``|i| <= n``, one column per basis function."""

    n: int
    entries: np.ndarray

    @property
    def p(self) -> int:
        return self.entries.shape[1]

    @property
    def rows(self) -> int:
        return self.entries.shape[0]


def assemble_matrix(basis: list, n: int) -> BasisMatrix:
    if not basis:
        raise ValueError("empty basis")
    c0 = basis[0].center
    if any(not np.array_equal(b.center, c0) for b in basis):
        raise ValueError("basis functions have different centers")
    cols = [taylor_table(b, n).coeffs for b in basis]
    return BasisMatrix(n, np.column_stack(cols))


def reference_matrix_E(n: int, dirs, s: complex, P, D) -> BasisMatrix:
    """Taylor coefficients of ``exp(s P D^{-1/2} d_l . x)`` at the origin."""
    scale = s * np.asarray(P) @ np.diag(1.0 / np.sqrt(np.diag(D).astype(np.complex128)))
    cols = [TaylorTable.exp_linear((0, 0, 0), n, scale @ e.d).coeffs for e in dirs]
    return BasisMatrix(n, np.column_stack(cols))


def reference_matrix_R(n: int, dirs) -> BasisMatrix:
    """Entries ``sin(phi)^i1 cos(phi)^i2 sin(theta)^(i1+i2) cos(theta)^i3 / i!``."""
    mi = index_set(n).mi
    fact = np.array([factorial(a) * factorial(b) * factorial(c) for a, b, c in mi], dtype=float)
    cols = []
    for e in dirs:
        v = (np.sin(e.phi) ** mi[:, 0] * np.cos(e.phi) ** mi[:, 1]
             * np.sin(e.theta) ** (mi[:, 0] + mi[:, 1]) * np.cos(e.theta) ** mi[:, 2])
        cols.append(v / fact)
    return BasisMatrix(n, np.column_stack(cols).astype(np.complex128))


def numerical_rank(M, rtol: float = RANK_RTOL) -> int:
    a = M.entries if isinstance(M, BasisMatrix) else np.asarray(M)
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))
