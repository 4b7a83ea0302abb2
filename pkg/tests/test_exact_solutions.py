import numpy as np
import pytest
import scipy.special

from qtrefftz.airy import AI0, AIP0, T_MAX, airy_ai, airy_derivs, airy_pair, airy_seed_values
from qtrefftz.exact_solutions import (CaseId, solution_gradient, solution_gradients, solution_taylor,
                                      solution_value, solution_values, test_case)
from qtrefftz.operator_core import apply_operator_taylor


def test_airy_matches_scipy():
    t = np.linspace(-T_MAX, T_MAX, 3001)
    ai, aip = airy_pair(t)
    ref = scipy.special.airy(t)
    scale = np.maximum(1.0, np.abs(t)) ** 0.25  # oscillation amplitude grows like |t|^(1/4) in Ai'
    assert np.max(np.abs(ai - ref[0])) < 1e-13
    assert np.max(np.abs(aip - ref[1]) / scale) < 1e-13


def test_airy_relative_accuracy_on_decay():
    t = np.linspace(0, T_MAX, 500)
    np.testing.assert_allclose(airy_ai(t), scipy.special.airy(t)[0], rtol=1e-12)


def test_airy_seed_values():
    a, b = airy_seed_values()
    assert a == pytest.approx(0.3550280538878172, abs=1e-16) == AI0
    assert b == pytest.approx(-0.2588194037928068, abs=1e-16) == AIP0
    assert airy_ai(0.0) == pytest.approx(AI0, abs=1e-16)


def test_airy_ode_residual(rng):
    for t in rng.uniform(-5, 5, 100):
        d = airy_derivs(t, 4)
        assert abs(d[2] - t * d[0]) < 1e-12
        assert abs(d[3] - d[0] - t * d[1]) < 1e-12


def test_airy_derivs_vs_finite_differences():
    t, h = 1.3, 1e-4
    d = airy_derivs(t, 3)
    fd = (airy_derivs(t + h, 2)[2] - airy_derivs(t - h, 2)[2]) / (2 * h)
    assert d[3] == pytest.approx(fd, rel=1e-7)
    assert airy_derivs(t, 0).shape == (1,)


def test_airy_range_errors():
    with pytest.raises(ValueError):
        airy_ai(T_MAX + 1)
    with pytest.raises(ValueError):
        airy_ai(np.nan)
    with pytest.raises(ValueError):
        airy_derivs(0.0, -1)


def test_solution_examples():
    tc1, tc2 = test_case("tc1"), test_case(CaseId.TC2)
    assert solution_value(tc1, (0, 0, 0)) == 1
    assert solution_value(tc1, (0.3, np.pi / 2, -0.2)) == pytest.approx(-1j, abs=1e-15)
    assert solution_value(tc2, (0, 0, 0)) == pytest.approx(AI0, abs=1e-16)


def test_case_parameters():
    tc3 = test_case("TC3")
    assert (tc3.kappa, tc3.mach) == (2.0, 0.2)
    assert test_case("tc1").kappa == 3.0
    assert test_case("tc2", kappa=5.0).kappa == 5.0
    with pytest.raises(ValueError):
        test_case("tc4")


def test_centers_deterministic_and_in_box():
    tc = test_case("tc1")
    a, b = tc.centers(50), tc.centers(50)
    np.testing.assert_array_equal(a, b)
    lo = np.array([bx[0] for bx in tc.box])
    hi = np.array([bx[1] for bx in tc.box])
    assert np.all(a >= lo) and np.all(a <= hi)
    assert not np.array_equal(a, tc.centers(50, seed=1))


def test_solution_taylor_tc1():
    t = solution_taylor(test_case("tc1"), (0, 0, 0), 6)
    assert t[(0, 2, 0)] == pytest.approx(-4.5)
    for i, v in t.as_dict().items():
        if i[0] + i[2] > 0:
            assert v == 0


@pytest.mark.parametrize("case", list(CaseId))
def test_solution_annihilated(case):
    tc = test_case(case)
    for c in tc.centers(5):
        u = solution_taylor(tc, c, 12)
        assert apply_operator_taylor(tc.operator(c, 10), u, 10).max_abs() <= 1e-11


@pytest.mark.parametrize("case", list(CaseId))
def test_taylor_matches_values(case, rng):
    tc = test_case(case)
    c = tc.centers(1)[0]
    t = solution_taylor(tc, c, 12)
    dx = rng.uniform(-0.05, 0.05, (5, 3))
    approx = [sum(v * np.prod(d ** np.array(i)) for i, v in t.as_dict().items()) for d in dx]
    np.testing.assert_allclose(approx, solution_values(tc, c + dx), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("case", list(CaseId))
def test_gradient_finite_differences(case, rng):
    tc = test_case(case)
    h = 1e-6
    for x in tc.centers(5, seed=9):
        g = solution_gradient(tc, x)
        fd = [(solution_value(tc, x + h * e) - solution_value(tc, x - h * e)) / (2 * h) for e in np.eye(3)]
        assert np.linalg.norm(g - fd) <= 1e-7 * max(1.0, np.linalg.norm(g))
    assert solution_gradients(tc, tc.centers(3)).shape == (3, 3)


def test_taylor_order_limit():
    with pytest.raises(ValueError):
        solution_taylor(test_case("tc1"), (0, 0, 0), 13)
