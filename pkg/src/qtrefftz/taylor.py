"""Truncated trivariate Taylor tables at a fixed center.

A table stores ``T_f[i] = d^i f(x_C) / i!`` for every ``|i| <= order`` in a
dense complex vector indexed by :func:`qtrefftz.multiindex.numbering`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from . import _kernels
from .multiindex import count_upto, index_set, numbering


def _as_center(center) -> np.ndarray:
    c = np.asarray(center, dtype=float).reshape(3)
    c.setflags(write=False)
    return c


@dataclass(frozen=True, eq=False)
class TaylorTable:
    center: np.ndarray
    order: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", _as_center(self.center))
        arr = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if arr.shape[0] != count_upto(self.order):
            raise ValueError(
                f"order {self.order} needs {count_upto(self.order)} coefficients, got {arr.shape[0]}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # construction

    @classmethod
    def zeros(cls, center, order: int) -> TaylorTable:
        return cls(center, order, np.zeros(count_upto(order), dtype=np.complex128))

    @classmethod
    def constant(cls, center, order: int, value: complex = 1.0) -> TaylorTable:
        c = np.zeros(count_upto(order), dtype=np.complex128)
        c[0] = value
        return cls(center, order, c)

    @classmethod
    def monomial(cls, center, order: int, power, value: complex = 1.0) -> TaylorTable:
        """Table of ``value * (X - x_C)^power``."""
        c = np.zeros(count_upto(order), dtype=np.complex128)
        if sum(power) <= order:
            c[numbering(power)] = value
        return cls(center, order, c)

    @classmethod
    def from_dict(cls, center, order: int, entries: dict) -> TaylorTable:
        c = np.zeros(count_upto(order), dtype=np.complex128)
        for i, v in entries.items():
            if sum(i) <= order:
                c[numbering(i)] += v
        return cls(center, order, c)

    @classmethod
    def exp_linear(cls, center, order: int, rate) -> TaylorTable:
        """Table of ``exp(rate . (X - x_C))``: entries ``rate^i / i!``."""
        rate = np.asarray(rate, dtype=np.complex128).reshape(3)
        mi = index_set(order).mi
        fact = np.array([factorial(a) * factorial(b) * factorial(c) for a, b, c in mi], dtype=float)
        vals = np.prod(rate[None, :] ** mi, axis=1) / fact
        return cls(center, order, vals)

    # access

    def __getitem__(self, i) -> complex:
        if sum(i) > self.order:
            raise IndexError(f"multi-index {tuple(i)} beyond table order {self.order}")
        return complex(self.coeffs[numbering(i)])

    def get(self, i, default: complex = 0.0) -> complex:
        if sum(i) > self.order:
            return default
        return complex(self.coeffs[numbering(i)])

    def as_dict(self) -> dict:
        return {tuple(int(v) for v in i): complex(c) for i, c in zip(index_set(self.order).mi, self.coeffs)}

    def truncate(self, order: int) -> TaylorTable:
        if order > self.order:
            raise ValueError(f"cannot raise table order from {self.order} to {order}")
        return TaylorTable(self.center, order, self.coeffs[: count_upto(order)])

    def same_center(self, other: TaylorTable) -> bool:
        return bool(np.array_equal(self.center, other.center))

    def _check_center(self, other: TaylorTable) -> None:
        if not self.same_center(other):
            raise ValueError(f"center mismatch: {self.center} vs {other.center}")

    # arithmetic

    def __add__(self, other) -> TaylorTable:
        if isinstance(other, TaylorTable):
            self._check_center(other)
            order = min(self.order, other.order)
            n = count_upto(order)
            return TaylorTable(self.center, order, self.coeffs[:n] + other.coeffs[:n])
        c = self.coeffs.copy()
        c[0] += other
        return TaylorTable(self.center, self.order, c)

    __radd__ = __add__

    def __neg__(self) -> TaylorTable:
        return TaylorTable(self.center, self.order, -self.coeffs)

    def __sub__(self, other) -> TaylorTable:
        return self + (-other)

    def __rsub__(self, other) -> TaylorTable:
        return (-self) + other

    def __mul__(self, other) -> TaylorTable:
        if isinstance(other, TaylorTable):
            return taylor_product(self, other)
        return TaylorTable(self.center, self.order, self.coeffs * other)

    __rmul__ = __mul__

    def derivative(self, alpha) -> TaylorTable:
        """Table of ``d^alpha f``: ``T[b] = (alpha+b)!/b! * T_f[alpha+b]``; order drops by ``|alpha|``."""
        a = tuple(int(v) for v in alpha)
        new_order = self.order - sum(a)
        if new_order < 0:
            raise ValueError(f"table of order {self.order} cannot be differentiated by {a}")
        mi = index_set(new_order).mi
        src = index_set(self.order).lookup[mi[:, 0] + a[0], mi[:, 1] + a[1], mi[:, 2] + a[2]]
        weight = np.ones(mi.shape[0])
        for k in range(3):
            for t in range(1, a[k] + 1):
                weight = weight * (mi[:, k] + t)
        return TaylorTable(self.center, new_order, self.coeffs[src] * weight)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def __repr__(self) -> str:
        return f"TaylorTable(center={self.center.tolist()}, order={self.order})"


def taylor_product(a: TaylorTable, b: TaylorTable) -> TaylorTable:
    """Truncated product: ``T_fg[b] = sum_{g <= b} T_f[b-g] T_g[g]`` up to ``min(a.order, b.order)``."""
    a._check_center(b)
    order = min(a.order, b.order)
    idx = index_set(order)
    n = idx.count
    out = _kernels.truncated_product(
        np.ascontiguousarray(a.coeffs[:n]), np.ascontiguousarray(b.coeffs[:n]), idx.mi, idx.lookup, n
    )
    return TaylorTable(a.center, order, out)
