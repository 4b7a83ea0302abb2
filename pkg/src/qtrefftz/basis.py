"""The basis-function record shared by construction, evaluation and the residual oracle."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .multiindex import count_upto, index_set, numbering
from .taylor import TaylorTable, _as_center


class Family(str, Enum):
    AMPLITUDE = "amplitude"
    PHASE = "phase"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True, eq=False)
class BasisFunction:
    """One quasi-Trefftz function centered at ``center``.

    AMPLITUDE: ``Q(x - x_C) exp(lam . (x - x_C))`` with ``poly`` the table of Q.
    PHASE: ``exp(P(x - x_C))``; the linear part of ``poly`` plays the role of lam.
    POLYNOMIAL: ``R(x - x_C)``.
    """

    family: Family
    center: np.ndarray
    q: int
    poly: np.ndarray
    lam: np.ndarray | None = None
    direction: tuple | None = None  # (theta, phi, s) used at initialization

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "center", _as_center(self.center))
        poly = np.array(self.poly, dtype=np.complex128).reshape(-1)
        if poly.shape[0] != count_upto(self.degree):
            raise ValueError(f"q={self.q} needs {count_upto(self.degree)} polynomial coefficients")
        poly.setflags(write=False)
        object.__setattr__(self, "poly", poly)
        if self.family is Family.AMPLITUDE:
            if self.lam is None:
                raise ValueError("amplitude-based functions need an exponent vector")
            lam = np.array(self.lam, dtype=np.complex128).reshape(3)
            lam.setflags(write=False)
            object.__setattr__(self, "lam", lam)
        elif self.lam is not None:
            raise ValueError(f"{self.family.value} functions carry no separate exponent vector")

    @property
    def degree(self) -> int:
        return self.q + 1

    @property
    def exponent(self) -> np.ndarray:
        """Linear phase: lam for AMPLITUDE, the degree-one part of P for PHASE, zero otherwise."""
        if self.family is Family.AMPLITUDE:
            return self.lam
        if self.family is Family.PHASE:
            return self.poly[1:4].copy()
        return np.zeros(3, dtype=np.complex128)

    def coefficient(self, i) -> complex:
        if sum(i) > self.degree:
            return 0j
        return complex(self.poly[numbering(i)])

    def polynomial_table(self) -> TaylorTable:
        return TaylorTable(self.center, self.degree, self.poly)

    def coefficient_cube(self) -> np.ndarray:
        d = self.degree
        cube = np.zeros((d + 1,) * 3, dtype=np.complex128)
        mi = index_set(d).mi
        cube[mi[:, 0], mi[:, 1], mi[:, 2]] = self.poly
        return cube

    def with_poly(self, poly) -> BasisFunction:
        return BasisFunction(self.family, self.center, self.q, poly, self.lam, self.direction)
