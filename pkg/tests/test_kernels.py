"""The numba kernels and their Python fallbacks must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from qtrefftz import _kernels
from qtrefftz.coefficients import OperatorCase, builtin_operator
from qtrefftz.construct import default_s, _seed
from qtrefftz.multiindex import count_upto, index_set
from qtrefftz.operator_core import check_hypothesis


def _rand(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


@pytest.mark.parametrize("order", [0, 3, 6])
def test_products_agree(order, rng):
    idx = index_set(order)
    a, b = _rand(rng, idx.count), _rand(rng, idx.count)
    ref = _kernels.truncated_product_py(a, b, idx.mi, idx.lookup, idx.count)
    np.testing.assert_allclose(_kernels.truncated_product_np(a, b, idx.mi, idx.lookup, idx.count), ref, atol=1e-12)
    np.testing.assert_allclose(_kernels.truncated_product(a, b, idx.mi, idx.lookup, idx.count), ref, atol=1e-12)


def test_exp_series_agrees(rng):
    idx = index_set(5)
    p = 0.3 * _rand(rng, idx.count)
    p[0] = 0
    np.testing.assert_allclose(_kernels.exp_series(p, idx.mi, idx.lookup, idx.count),
                               _kernels.exp_series_py(p, idx.mi, idx.lookup, idx.count), atol=1e-13)


def test_horner_agrees(rng):
    cube = rng.normal(size=(4, 4, 4)) + 0j
    pts = rng.normal(size=(30, 3))
    ref = _kernels.horner3_py(cube, pts)
    np.testing.assert_allclose(_kernels.horner3_np(cube, pts), ref, rtol=1e-12)
    np.testing.assert_allclose(_kernels.horner3(cube, pts), ref, rtol=1e-12)


@pytest.mark.parametrize("kind", ["amplitude", "phase", "polynomial"])
def test_layer_kernels_agree(kind, rng):
    q = 4
    c = builtin_operator(OperatorCase.CONVECTED_AIRY, 2.0, 0.2, (0.1, 0.2, 0.3), q + 1)
    idx, cidx = index_set(q + 1), index_set(c.max_order)
    coef = np.ascontiguousarray(c.tables)
    principal = np.ascontiguousarray(c.principal())
    lam = _seed(check_hypothesis(c), default_s(c), np.array([0.0, 0.6, 0.8]))
    results = []
    for rhs_fn, solve in ((getattr(_kernels, f"layer_rhs_{kind}"), _kernels.solve_layer),
                          (getattr(_kernels, f"layer_rhs_{kind}_py"), _kernels.solve_layer_py)):
        xi = np.zeros(count_upto(q + 1), dtype=complex)
        if kind == "phase":
            xi[1:4] = lam
        else:
            xi[0] = 1
        rhs = np.zeros(idx.count, dtype=complex)
        for ell in range(q):
            extra = (lam,) if kind == "amplitude" else ()
            rhs_fn(ell, xi, *extra, coef, idx.lookup, cidx.lookup, rhs)
            solve(ell, rhs, xi, principal, idx.lookup)
        results.append(xi)
    np.testing.assert_allclose(results[0], results[1], rtol=1e-13, atol=1e-14)


def test_env_flag_selects_fallback():
    code = "from qtrefftz import _kernels; print(_kernels.NUMBA_ENABLED, _kernels.solve_layer is _kernels.solve_layer_py)"
    env = dict(os.environ, QTREFFTZ_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split() == ["False", "True"]


def test_fallback_passes_verify():
    env = dict(os.environ, QTREFFTZ_DISABLE_NUMBA="1")
    r = subprocess.run([sys.executable, "-m", "qtrefftz", "verify"], env=env, capture_output=True, text=True)
    assert r.returncode == 0, r.stdout + r.stderr
