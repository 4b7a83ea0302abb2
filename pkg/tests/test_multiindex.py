import itertools

import pytest
from hypothesis import given, strategies as st

from qtrefftz.multiindex import (MAX_COMPONENT, MultiIndex, Order, compare_prec, count_upto, from_numbering,
                                 index_set, layer, layer_size, numbering, upto)

idx = st.tuples(*[st.integers(0, 8)] * 3)


@pytest.mark.parametrize("i, expected", [((0, 0, 0), 0), ((1, 0, 0), 1), ((0, 0, 1), 3), ((0, 0, 2), 9)])
def test_numbering_examples(i, expected):
    assert numbering(i) == expected


def test_layer_examples():
    assert layer(0) == [(0, 0, 0)]
    assert layer(1) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert layer(2)[:4] == [(0, 0, 2), (0, 1, 1), (0, 2, 0), (1, 0, 1)]
    for ell in range(9):
        assert len(layer(ell)) == layer_size(ell) == (ell + 1) * (ell + 2) // 2


@pytest.mark.parametrize("i, j, expected", [
    ((0, 1, 0), (1, 0, 0), Order.LT),
    ((2, 0, 0), (0, 0, 3), Order.LT),
    ((1, 1, 0), (1, 0, 1), Order.GT),
    ((1, 1, 1), (1, 1, 1), Order.EQ),
])
def test_compare_examples(i, j, expected):
    assert compare_prec(i, j) is expected


def test_numbering_is_bijective_and_layered():
    n = 8
    nums = sorted(numbering(i) for i in upto(n))
    assert nums == list(range(count_upto(n)))
    for ell in range(n + 1):
        block = sorted(numbering(i) for i in layer(ell))
        assert block == list(range(count_upto(ell - 1), count_upto(ell)))


def test_numbering_reverses_layer_order_within_a_layer():
    for ell in range(9):
        nums = [numbering(i) for i in layer(ell)]
        assert nums == sorted(nums, reverse=True)


@given(idx, idx)
def test_compare_is_total_and_consistent_across_layers(i, j):
    a, b = compare_prec(i, j), compare_prec(j, i)
    assert a == -b
    assert (a is Order.EQ) == (i == j)
    if sum(i) < sum(j):
        assert a is Order.LT and numbering(i) < numbering(j)


def test_layer_concatenation_enumerates_once():
    all_idx = upto(6)
    assert len(all_idx) == len(set(all_idx)) == count_upto(6)
    assert set(all_idx) == {t for t in itertools.product(range(7), repeat=3) if sum(t) <= 6}


def test_from_numbering_roundtrip():
    for k in range(count_upto(7)):
        assert numbering(from_numbering(k)) == k


def test_index_set_lookup():
    s = index_set(4)
    assert s.count == count_upto(4)
    for k, i in enumerate(s.mi):
        assert s.lookup[tuple(i)] == k
    assert s.lookup[4, 4, 4] == -1
    with pytest.raises(ValueError):
        s.mi[0, 0] = 3


def test_multiindex_arithmetic():
    a, b = MultiIndex(1, 2, 0), MultiIndex(0, 1, 3)
    assert a + b == (1, 3, 3)
    assert (a + b) - b == a
    assert a.length == 3
    assert MultiIndex(0, 1, 0).leq(a) and MultiIndex(0, 1, 0).lt(a) and not a.lt(a)
    assert a.factorial() == 2


def test_component_cap():
    with pytest.raises(ValueError):
        numbering((MAX_COMPONENT + 1, 0, 0))
    with pytest.raises(ValueError):
        numbering((-1, 0, 0))
