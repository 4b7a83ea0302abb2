"""Inner loops of the construction and evaluation code.

Every kernel exists as a plain Python function (``*_py``) and, when numba is
importable and not disabled, as an ``njit`` compiled twin. Set
``QTREFFTZ_DISABLE_NUMBA=1`` to force the fallback path. The dispatching names
without suffix are what the rest of the package calls.

Dense tables are 1-D complex arrays indexed by the zero-based numbering of
multi-indices; ``lookup`` is the 3-D numbering table of ``multiindex.index_set``.
"""

from __future__ import annotations

import os

import numpy as np

from .multiindex import IDX_2E, IDX_CROSS, IDX_E, PAIRS

try:  # pragma: no cover - exercised implicitly
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


NUMBA_ENABLED = _HAVE_NUMBA and not _flag("QTREFFTZ_DISABLE_NUMBA")

# row 3 is the "no shift" sentinel
UNIT = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=np.int64)
I2E = np.array(IDX_2E, dtype=np.int64)
IE = np.array(IDX_E, dtype=np.int64)
IX = np.array(IDX_CROSS, dtype=np.int64)
PAIR = np.array(PAIRS, dtype=np.int64)


def _shift(lookup, g1, g2, g3, a, b):
    return lookup[g1 + UNIT[a, 0] + UNIT[b, 0], g2 + UNIT[a, 1] + UNIT[b, 1], g3 + UNIT[a, 2] + UNIT[b, 2]]


def _component(g1, g2, g3, k):
    if k == 0:
        return g1
    if k == 1:
        return g2
    return g3


def truncated_product_py(a, b, mi, lookup, count):
    out = np.zeros(count, dtype=np.complex128)
    for t in range(count):
        b1, b2, b3 = mi[t, 0], mi[t, 1], mi[t, 2]
        acc = 0j
        for g1 in range(b1 + 1):
            for g2 in range(b2 + 1):
                for g3 in range(b3 + 1):
                    acc += a[lookup[b1 - g1, b2 - g2, b3 - g3]] * b[lookup[g1, g2, g3]]
        out[t] = acc
    return out


def truncated_product_np(a, b, mi, lookup, count):
    """Vectorised over the output index, looping over the right factor."""
    out = np.zeros(count, dtype=np.complex128)
    rows = mi[:count]
    for g in range(count):
        if b[g] == 0:
            continue
        diff = rows - mi[g]
        ok = (diff >= 0).all(axis=1)
        d = diff[ok]
        out[ok] += a[lookup[d[:, 0], d[:, 1], d[:, 2]]] * b[g]
    return out


def exp_series_py(p, mi, lookup, count):
    """Taylor table of exp(P) from the table of P.

    Uses E(S) = S * E(P) with E the Euler operator sum_k x_k d/dx_k, which for
    a coefficient with length m > 0 reads
    S[a] = (1/m) * sum_{g < a} |a - g| P[a - g] S[g].
    """
    s = np.zeros(count, dtype=np.complex128)
    s[0] = np.exp(p[0])
    for t in range(1, count):
        a1, a2, a3 = mi[t, 0], mi[t, 1], mi[t, 2]
        m = a1 + a2 + a3
        acc = 0j
        for g1 in range(a1 + 1):
            for g2 in range(a2 + 1):
                for g3 in range(a3 + 1):
                    w = m - g1 - g2 - g3
                    if w == 0:
                        continue
                    acc += w * p[lookup[a1 - g1, a2 - g2, a3 - g3]] * s[lookup[g1, g2, g3]]
        s[t] = acc / m
    return s


def layer_rhs_amplitude_py(ell, mu, lam, coef, lookup, clookup, rhs):
    """Right-hand side of layer ``ell`` for the amplitude ansatz.

    The mixed second-order term at gamma == beta carries a layer ell+2
    unknown and is left to the subsystem, like the diagonal one.
    """
    for b1 in range(ell + 1):
        for b2 in range(ell - b1 + 1):
            b3 = ell - b1 - b2
            acc = 0j
            for g1 in range(b1 + 1):
                for g2 in range(b2 + 1):
                    for g3 in range(b3 + 1):
                        ci = clookup[b1 - g1, b2 - g2, b3 - g3]
                        strict = g1 != b1 or g2 != b2 or g3 != b3
                        m0 = mu[lookup[g1, g2, g3]]
                        for k in range(3):
                            c2 = coef[I2E[k], ci]
                            if c2 == 0:
                                continue
                            gk = _component(g1, g2, g3, k)
                            if strict:
                                acc += c2 * (gk + 2) * (gk + 1) * mu[_shift(lookup, g1, g2, g3, k, k)]
                            acc += c2 * (2 * lam[k] * (gk + 1) * mu[_shift(lookup, g1, g2, g3, k, 3)]
                                         + lam[k] * lam[k] * m0)
                        for p in range(3):
                            cc = coef[IX[p], ci]
                            if cc == 0:
                                continue
                            k, kp = PAIR[p, 0], PAIR[p, 1]
                            gk = _component(g1, g2, g3, k)
                            gkp = _component(g1, g2, g3, kp)
                            if strict:
                                acc += cc * (gk + 1) * (gkp + 1) * mu[_shift(lookup, g1, g2, g3, k, kp)]
                            acc += cc * (lam[k] * (gkp + 1) * mu[_shift(lookup, g1, g2, g3, kp, 3)]
                                         + lam[kp] * (gk + 1) * mu[_shift(lookup, g1, g2, g3, k, 3)]
                                         + lam[k] * lam[kp] * m0)
                        for k in range(3):
                            c1 = coef[IE[k], ci]
                            if c1 == 0:
                                continue
                            gk = _component(g1, g2, g3, k)
                            acc += c1 * ((gk + 1) * mu[_shift(lookup, g1, g2, g3, k, 3)] + lam[k] * m0)
                        acc += coef[0, ci] * m0
            rhs[lookup[b1, b2, b3]] = -acc


def _quadratic_py(lam, lookup, g1, g2, g3, a, b):
    # sum_{eta <= gamma} (gamma_a - eta_a + 1) lam[gamma - eta + e_a] (eta_b + 1) lam[eta + e_b]
    acc = 0j
    for h1 in range(g1 + 1):
        for h2 in range(g2 + 1):
            for h3 in range(g3 + 1):
                left = _component(g1 - h1, g2 - h2, g3 - h3, a) + 1
                right = _component(h1, h2, h3, b) + 1
                acc += (left * lam[_shift(lookup, g1 - h1, g2 - h2, g3 - h3, a, 3)]
                        * right * lam[_shift(lookup, h1, h2, h3, b, 3)])
    return acc


def layer_rhs_phase_py(ell, lam, coef, lookup, clookup, rhs):
    for b1 in range(ell + 1):
        for b2 in range(ell - b1 + 1):
            b3 = ell - b1 - b2
            acc = 0j
            for g1 in range(b1 + 1):
                for g2 in range(b2 + 1):
                    for g3 in range(b3 + 1):
                        ci = clookup[b1 - g1, b2 - g2, b3 - g3]
                        strict = g1 != b1 or g2 != b2 or g3 != b3
                        for k in range(3):
                            c2 = coef[I2E[k], ci]
                            if c2 == 0:
                                continue
                            gk = _component(g1, g2, g3, k)
                            if strict:
                                acc += c2 * (gk + 2) * (gk + 1) * lam[_shift(lookup, g1, g2, g3, k, k)]
                            acc += c2 * _quadratic(lam, lookup, g1, g2, g3, k, k)
                        for p in range(3):
                            cc = coef[IX[p], ci]
                            if cc == 0:
                                continue
                            k, kp = PAIR[p, 0], PAIR[p, 1]
                            if strict:
                                gk = _component(g1, g2, g3, k)
                                gkp = _component(g1, g2, g3, kp)
                                acc += cc * (gk + 1) * (gkp + 1) * lam[_shift(lookup, g1, g2, g3, k, kp)]
                            acc += cc * _quadratic(lam, lookup, g1, g2, g3, kp, k)
                        for k in range(3):
                            c1 = coef[IE[k], ci]
                            if c1 == 0:
                                continue
                            gk = _component(g1, g2, g3, k)
                            acc += c1 * (gk + 1) * lam[_shift(lookup, g1, g2, g3, k, 3)]
            acc += coef[0, clookup[b1, b2, b3]]
            rhs[lookup[b1, b2, b3]] = -acc


def layer_rhs_polynomial_py(ell, nu, coef, lookup, clookup, rhs):
    for b1 in range(ell + 1):
        for b2 in range(ell - b1 + 1):
            b3 = ell - b1 - b2
            acc = 0j
            for g1 in range(b1 + 1):
                for g2 in range(b2 + 1):
                    for g3 in range(b3 + 1):
                        ci = clookup[b1 - g1, b2 - g2, b3 - g3]
                        strict = g1 != b1 or g2 != b2 or g3 != b3
                        if strict:
                            for k in range(3):
                                gk = _component(g1, g2, g3, k)
                                acc += coef[I2E[k], ci] * (gk + 2) * (gk + 1) * nu[_shift(lookup, g1, g2, g3, k, k)]
                            for p in range(3):
                                k, kp = PAIR[p, 0], PAIR[p, 1]
                                gk = _component(g1, g2, g3, k)
                                gkp = _component(g1, g2, g3, kp)
                                acc += coef[IX[p], ci] * (gk + 1) * (gkp + 1) * nu[_shift(lookup, g1, g2, g3, k, kp)]
                        for k in range(3):
                            gk = _component(g1, g2, g3, k)
                            acc += coef[IE[k], ci] * (gk + 1) * nu[_shift(lookup, g1, g2, g3, k, 3)]
                        acc += coef[0, ci] * nu[lookup[g1, g2, g3]]
            rhs[lookup[b1, b2, b3]] = -acc


def solve_layer_py(ell, rhs, xi, principal, lookup):
    """Echelon substitution for the layer ell+2 unknowns with first component >= 2.

    ``principal`` holds the values at the center of the coefficients of
    d11, d22, d33, d12, d13, d23 in that order. Entries of ``xi`` with first
    component 0 or 1 are read, never written. Returns the number of pivots.
    """
    touched = 0
    for b1 in range(ell + 1):
        for b2 in range(ell - b1 + 1):
            b3 = ell - b1 - b2
            acc = rhs[lookup[b1, b2, b3]]
            acc -= (b2 + 2) * (b2 + 1) * principal[1] * xi[lookup[b1, b2 + 2, b3]]
            acc -= (b3 + 2) * (b3 + 1) * principal[2] * xi[lookup[b1, b2, b3 + 2]]
            acc -= (b1 + 1) * (b2 + 1) * principal[3] * xi[lookup[b1 + 1, b2 + 1, b3]]
            acc -= (b1 + 1) * (b3 + 1) * principal[4] * xi[lookup[b1 + 1, b2, b3 + 1]]
            acc -= (b2 + 1) * (b3 + 1) * principal[5] * xi[lookup[b1, b2 + 1, b3 + 1]]
            xi[lookup[b1 + 2, b2, b3]] = acc / ((b1 + 2) * (b1 + 1) * principal[0])
            touched += 1
    return touched


def horner3_py(cube, pts):
    """Evaluate sum c[a,b,c] x^a y^b z^c at each row of ``pts``; Horner in z, then y, then x."""
    n1, n2, n3 = cube.shape
    out = np.empty(pts.shape[0], dtype=np.complex128)
    for t in range(pts.shape[0]):
        x, y, z = pts[t, 0], pts[t, 1], pts[t, 2]
        vx = 0j
        for a in range(n1 - 1, -1, -1):
            vy = 0j
            for b in range(n2 - 1, -1, -1):
                vz = 0j
                for c in range(n3 - 1, -1, -1):
                    vz = vz * z + cube[a, b, c]
                vy = vy * y + vz
            vx = vx * x + vy
        out[t] = vx
    return out


def horner3_np(cube, pts):
    from numpy.polynomial import polynomial as P

    return np.asarray(P.polyval3d(pts[:, 0], pts[:, 1], pts[:, 2], cube), dtype=np.complex128)


if NUMBA_ENABLED:
    _njit = numba.njit(cache=True)
    _shift = _njit(_shift)
    _component = _njit(_component)
    _quadratic = _njit(_quadratic_py)
    truncated_product = _njit(truncated_product_py)
    exp_series = _njit(exp_series_py)
    layer_rhs_amplitude = _njit(layer_rhs_amplitude_py)
    layer_rhs_phase = _njit(layer_rhs_phase_py)
    layer_rhs_polynomial = _njit(layer_rhs_polynomial_py)
    solve_layer = _njit(solve_layer_py)
    horner3 = _njit(horner3_py)
else:
    _quadratic = _quadratic_py
    truncated_product = truncated_product_np
    exp_series = exp_series_py
    layer_rhs_amplitude = layer_rhs_amplitude_py
    layer_rhs_phase = layer_rhs_phase_py
    layer_rhs_polynomial = layer_rhs_polynomial_py
    solve_layer = solve_layer_py
    horner3 = horner3_np
