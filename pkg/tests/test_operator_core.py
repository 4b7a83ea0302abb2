import numpy as np
import pytest
import sympy

from qtrefftz.basis import BasisFunction, Family
from qtrefftz.coefficients import OperatorCase, PdeCoefficients, builtin_operator, coefficients_from_flow
from qtrefftz.construct import build_basis, construct_polynomial_qt
from qtrefftz.multiindex import count_upto
from qtrefftz.operator_core import (HypothesisViolation, apply_operator_taylor, check_hypothesis,
                                    residual_magnitude, residual_scale)
from qtrefftz.taylor import TaylorTable

X, Y, Z = sympy.symbols("x y z")
VARS = (X, Y, Z)


def test_structure_identity():
    st = check_hypothesis(builtin_operator(OperatorCase.HELMHOLTZ_CONST, 2.0))
    np.testing.assert_allclose(st.C, np.eye(3))
    np.testing.assert_allclose(np.abs(st.P), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(st.D, np.eye(3))


def test_structure_convected():
    st = check_hypothesis(builtin_operator(OperatorCase.CONVECTED_AIRY, 2.0, 0.2))
    np.testing.assert_allclose(st.C, np.diag([1, 1, 0.96]))


def test_structure_flow_determinant():
    one = TaylorTable.constant((0, 0, 0), 2, 1.0)
    zero = TaylorTable.zeros((0, 0, 0), 2)
    st = check_hypothesis(coefficients_from_flow(one, 0.5 * one, zero, zero, 1.0))
    np.testing.assert_allclose(st.C, np.diag([-0.75, -1, -1]))
    assert np.linalg.det(st.C) == pytest.approx(-0.75)


def test_flow_determinant_negative_for_random_subsonic_flow(rng):
    for _ in range(300):
        v = rng.normal(size=3)
        m = v / np.linalg.norm(v) * rng.uniform(0, 0.999)
        tabs = [TaylorTable.constant((0, 0, 0), 1, x) for x in (1.0, *m)]
        assert np.linalg.det(check_hypothesis(coefficients_from_flow(*tabs, kappa=1.0)).C) < 0


def test_spectral_reconstruction_random(rng):
    for _ in range(200):
        A = rng.normal(size=(3, 3))
        C = (A + A.T) / 2
        if abs(np.linalg.det(C)) < 1e-6 or abs(C[0, 0]) < 1e-6:
            continue
        t = np.zeros((10, 1), dtype=complex)
        t[[4, 7, 9], 0] = np.diag(C)
        t[[5, 6, 8], 0] = 2 * np.array([C[0, 1], C[0, 2], C[1, 2]])
        st = check_hypothesis(PdeCoefficients((0, 0, 0), 0, t))
        np.testing.assert_allclose(st.P @ st.D @ st.P.T, C, atol=1e-12 * np.abs(C).max())
        np.testing.assert_allclose(st.P.T @ st.P, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("mutate, reason", [
    (lambda t: t.__setitem__((4, 0), 0.0), "d11"),
    (lambda t: t.__setitem__((9, 0), 0.0), "singular"),
    (lambda t: t.__setitem__((7, 0), 1 + 1e-3j), "real"),
])
def test_hypothesis_violations(mutate, reason):
    t = np.array(builtin_operator(OperatorCase.HELMHOLTZ_CONST, 1.0, max_order=0).tables)
    mutate(t)
    with pytest.raises(HypothesisViolation, match=reason):
        check_hypothesis(PdeCoefficients((0, 0, 0), 0, t))


def test_plane_wave_is_annihilated():
    k = 3.0
    ops = builtin_operator(OperatorCase.HELMHOLTZ_CONST, k, max_order=4)
    f = TaylorTable.exp_linear((0, 0, 0), 6, (0, 1j * k, 0))
    assert apply_operator_taylor(ops, f, 4).max_abs() < 1e-14


def test_laplacian_of_square():
    k = 2.0
    ops = builtin_operator(OperatorCase.HELMHOLTZ_CONST, k, max_order=2)
    f = TaylorTable.monomial((0, 0, 0), 4, (2, 0, 0))
    out = apply_operator_taylor(ops, f, 2).as_dict()
    assert out[(0, 0, 0)] == 2 and out[(2, 0, 0)] == k * k
    assert all(v == 0 for i, v in out.items() if i not in ((0, 0, 0), (2, 0, 0)))


def test_order_requirements():
    ops = builtin_operator(OperatorCase.HELMHOLTZ_CONST, 1.0, max_order=2)
    with pytest.raises(ValueError):
        apply_operator_taylor(ops, TaylorTable.zeros((0, 0, 0), 3), 2)
    with pytest.raises(ValueError):
        apply_operator_taylor(ops, TaylorTable.zeros((0, 0, 0), 6), 3)


def test_oracle_matches_symbolic_operator(rng):
    order = 5
    n = count_upto(order)
    tables = rng.integers(-3, 4, (10, n)) + 1j * rng.integers(-3, 4, (10, n))
    ops = PdeCoefficients((0, 0, 0), order, tables)
    f = TaylorTable((0, 0, 0), order, np.r_[rng.integers(-3, 4, count_upto(order - 2)), np.zeros(n - count_upto(order - 2))])

    def poly(t):
        return sum((int(v.real) + int(v.imag) * sympy.I) * X**i[0] * Y**i[1] * Z**i[2] for i, v in t.as_dict().items())

    fs = poly(f)
    expr = 0
    for k, j in enumerate(ops.tables):
        jj = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)][k]
        d = fs
        for var, m in zip(VARS, jj):
            d = sympy.diff(d, var, m) if m else d
        expr += poly(ops.table(jj)) * d
    p = sympy.Poly(sympy.expand(expr), *VARS)
    ref = {m: complex(c) for m, c in zip(p.monoms(), p.coeffs()) if sum(m) <= order - 2}
    got = apply_operator_taylor(ops, f, order - 2).as_dict()
    for i, v in got.items():
        assert abs(v - ref.get(i, 0)) <= 1e-12 * max(1.0, abs(v))


def test_residual_zero_and_perturbation_detected():
    ops = builtin_operator(OperatorCase.HELMHOLTZ_AIRY, 2.0, center=(0.2, 0.1, -0.3), max_order=5)
    b = construct_polynomial_qt(ops, 3, (0, 1, 1))
    assert residual_magnitude(ops, b) <= 1e-10 * residual_scale(ops, b)
    poly = np.array(b.poly)
    target = np.flatnonzero(np.abs(poly) > 0)[-1]
    poly[target] += 1e-3
    assert residual_magnitude(ops, b.with_poly(poly)) >= 1e-4


def test_residual_order_one_uses_constant_term_only():
    ops = builtin_operator(OperatorCase.HELMHOLTZ_CONST, 2.0, max_order=3)
    for b in build_basis(ops, 1, Family.PHASE):
        assert b.q == 1
        # residual table has exactly one entry
        from qtrefftz.operator_core import residual_table
        assert residual_table(ops, b).coeffs.size == 1


def test_residual_center_mismatch():
    ops = builtin_operator(OperatorCase.HELMHOLTZ_CONST, 2.0, max_order=3)
    b = BasisFunction(Family.POLYNOMIAL, (1, 0, 0), 1, np.zeros(10))
    with pytest.raises(ValueError):
        residual_magnitude(ops, b)
