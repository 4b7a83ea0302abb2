"""Multi-indices in N_0^3: orderings, layers and the global numbering.

Two orders coexist here. ``compare_prec`` / ``layer`` sort by length, then
first component, then second component. ``numbering`` also sorts by length
first, but inside a layer it uses the closed form
``(i2+i3)(i2+i3+1)/2 + i3``, which happens to be the exact reverse of the
layer order. Numbering is zero-based so it can index matrix rows directly.
"""

from __future__ import annotations

from enum import IntEnum
from functools import lru_cache
from typing import NamedTuple

import numpy as np

MAX_COMPONENT = 255


class MultiIndex(NamedTuple):
    i1: int
    i2: int
    i3: int

    @property
    def length(self) -> int:
        return self.i1 + self.i2 + self.i3

    def __add__(self, other) -> MultiIndex:  # componentwise, not concatenation
        return MultiIndex(self.i1 + other[0], self.i2 + other[1], self.i3 + other[2])

    def __sub__(self, other) -> MultiIndex:
        return MultiIndex(self.i1 - other[0], self.i2 - other[1], self.i3 - other[2])

    def leq(self, other) -> bool:
        """Componentwise partial order ``self <= other``."""
        return self.i1 <= other[0] and self.i2 <= other[1] and self.i3 <= other[2]

    def lt(self, other) -> bool:
        """Strict partial order: ``self <= other`` and ``self != other``."""
        return self.leq(other) and tuple(self) != tuple(other)

    def factorial(self) -> int:
        from math import factorial

        return factorial(self.i1) * factorial(self.i2) * factorial(self.i3)


ZERO = MultiIndex(0, 0, 0)
E1, E2, E3 = MultiIndex(1, 0, 0), MultiIndex(0, 1, 0), MultiIndex(0, 0, 1)
UNIT = (E1, E2, E3)


class Order(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def _check(i) -> tuple[int, int, int]:
    a, b, c = (int(v) for v in i)
    if min(a, b, c) < 0 or max(a, b, c) > MAX_COMPONENT:
        raise ValueError(f"multi-index components must lie in [0, {MAX_COMPONENT}]: {tuple(i)}")
    return a, b, c


def count_upto(n: int) -> int:
    """Number of multi-indices with length <= n."""
    if n < 0:
        return 0
    return (n + 1) * (n + 2) * (n + 3) // 6


def layer_size(length: int) -> int:
    return (length + 1) * (length + 2) // 2


def numbering(i) -> int:
    a, b, c = _check(i)
    m = a + b + c
    s = b + c
    return m * (m + 1) * (m + 2) // 6 + s * (s + 1) // 2 + c


def from_numbering(k: int) -> MultiIndex:
    m = 0
    while count_upto(m) <= k:
        m += 1
    return MultiIndex(*(int(v) for v in index_set(m).mi[k]))


def _prec_key(i) -> tuple[int, int, int]:
    return (i[0] + i[1] + i[2], i[0], i[1])


def compare_prec(i, j) -> Order:
    ki, kj = _prec_key(_check(i)), _prec_key(_check(j))
    if ki < kj:
        return Order.LT
    if ki > kj:
        return Order.GT
    return Order.EQ


def layer(length: int) -> list[MultiIndex]:
    """All multi-indices of the given length, sorted by the layer order."""
    if length < 0:
        raise ValueError("layer length must be non-negative")
    return [
        MultiIndex(a, b, length - a - b)
        for a in range(length + 1)
        for b in range(length - a + 1)
    ]


def upto(n: int) -> list[MultiIndex]:
    """All multi-indices with length <= n, layer by layer in layer order."""
    return [i for m in range(n + 1) for i in layer(m)]


class IndexSet(NamedTuple):
    """Dense indexing helpers for tables truncated at ``order``.

    ``mi[k]`` is the multi-index with numbering ``k``; ``lookup[a, b, c]`` is
    the numbering of ``(a, b, c)`` or -1 when its length exceeds ``order``.
    """

    order: int
    mi: np.ndarray
    lookup: np.ndarray
    lengths: np.ndarray

    @property
    def count(self) -> int:
        return self.mi.shape[0]


@lru_cache(maxsize=None)
def index_set(order: int) -> IndexSet:
    if order < 0:
        raise ValueError("order must be non-negative")
    count = count_upto(order)
    mi = np.zeros((count, 3), dtype=np.int64)
    lookup = -np.ones((order + 1,) * 3, dtype=np.int64)
    for m in range(order + 1):
        for a in range(m + 1):
            for b in range(m - a + 1):
                k = numbering((a, b, m - a - b))
                mi[k] = (a, b, m - a - b)
                lookup[a, b, m - a - b] = k
    lengths = mi.sum(axis=1)
    for arr in (mi, lookup, lengths):
        arr.setflags(write=False)
    return IndexSet(order, mi, lookup, lengths)


# numbering of the ten operator multi-indices |j| <= 2
IDX_ZERO = 0
IDX_E = (1, 2, 3)
IDX_2E = (numbering((2, 0, 0)), numbering((0, 2, 0)), numbering((0, 0, 2)))
PAIRS = ((0, 1), (0, 2), (1, 2))
IDX_CROSS = (numbering((1, 1, 0)), numbering((1, 0, 1)), numbering((0, 1, 1)))
