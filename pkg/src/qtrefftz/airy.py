"""Airy function Ai on [-15, 15] without special-function libraries.

Ai is tabulated (value and slope) on a grid of spacing 1/4 and continued to
any point by the local Taylor series of ``y'' = t y``. Negative anchors are
reached by stepping from the known values at 0; positive anchors by stepping
backwards from t = 12, where the asymptotic expansion is accurate to full
precision. Backward stepping keeps the decaying solution dominant.
"""

from __future__ import annotations

from functools import lru_cache
from math import gamma, pi, sqrt

import numpy as np

AI0 = 0.3550280538878172  # 3^(-2/3) / Gamma(2/3)
AIP0 = -0.2588194037928068  # -3^(-1/3) / Gamma(1/3)

T_MAX = 15.0
STEP = 0.25
_ASYMPTOTIC_FROM = 12.0
_TERMS = 30


def _local_coeffs(t0, a0, a1, terms: int = _TERMS) -> np.ndarray:
    """Taylor coefficients of the solution through (a0, a1) at t0; works on arrays."""
    t0, a0, a1 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t0, a0, a1)))
    c = np.zeros(t0.shape + (terms,))
    c[..., 0] = a0
    c[..., 1] = a1
    c[..., 2] = t0 * a0 / 2
    for k in range(1, terms - 2):
        c[..., k + 2] = (t0 * c[..., k] + c[..., k - 1]) / ((k + 2) * (k + 1))
    return c


def _step(t0: float, a0: float, a1: float, h: float) -> tuple[float, float]:
    c = _local_coeffs(t0, a0, a1)
    k = np.arange(_TERMS)
    p = h ** k
    return float(c @ p), float((c[1:] * k[1:]) @ p[:-1])


def _asymptotic(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ai and Ai' for large positive t."""
    zeta = 2.0 / 3.0 * t**1.5
    su = np.ones_like(t)
    sv = np.ones_like(t)
    u = 1.0
    term = np.ones_like(t)
    for k in range(1, 40):
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        term = term * (-1.0 / zeta)
        su = su + u * term
        sv = sv + v * term
    pref = np.exp(-zeta) / (2 * sqrt(pi))
    return pref * t**-0.25 * su, -pref * t**0.25 * sv


@lru_cache(maxsize=1)
def _anchors() -> tuple[np.ndarray, np.ndarray]:
    n_neg = int(round(T_MAX / STEP))
    n_pos = int(round(_ASYMPTOTIC_FROM / STEP))
    grid = np.arange(-n_neg, n_pos + 1) * STEP
    vals = np.zeros((grid.size, 2))
    zero = n_neg
    vals[zero] = AI0, AIP0
    for k in range(zero, 0, -1):
        vals[k - 1] = _step(grid[k], *vals[k], -STEP)
    a, b = _asymptotic(np.array([_ASYMPTOTIC_FROM]))
    vals[-1] = a[0], b[0]
    for k in range(grid.size - 1, zero + 1, -1):
        vals[k - 1] = _step(grid[k], *vals[k], -STEP)
    vals.setflags(write=False)
    return grid, vals


def _check_range(t: np.ndarray) -> None:
    if np.any(~np.isfinite(t)) or np.any(np.abs(t) > T_MAX):
        raise ValueError(f"Airy argument outside the supported range [-{T_MAX}, {T_MAX}]")


def airy_pair(t) -> tuple[np.ndarray, np.ndarray]:
    """``(Ai(t), Ai'(t))`` elementwise."""
    t = np.asarray(t, dtype=float)
    _check_range(t)
    grid, vals = _anchors()
    near = t <= _ASYMPTOTIC_FROM
    ai = np.empty_like(t)
    aip = np.empty_like(t)
    if np.any(near):
        tn = t[near]
        k = np.clip(np.rint((tn - grid[0]) / STEP).astype(int), 0, grid.size - 1)
        c = _local_coeffs(grid[k], vals[k, 0], vals[k, 1])
        h = tn - grid[k]
        powers = h[:, None] ** np.arange(_TERMS)
        ai[near] = np.sum(c * powers, axis=1)
        aip[near] = np.sum(c[:, 1:] * np.arange(1, _TERMS) * powers[:, :-1], axis=1)
    if np.any(~near):
        ai[~near], aip[~near] = _asymptotic(t[~near])
    return ai, aip


def airy_ai(t):
    ai, _ = airy_pair(t)
    return ai if ai.ndim else float(ai)


def airy_derivs(t: float, m: int) -> np.ndarray:
    """``[Ai(t), Ai'(t), ..., Ai^(m)(t)]`` via ``Ai^(k+2) = t Ai^(k) + k Ai^(k-1)``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    ai, aip = airy_pair(float(t))
    out = np.zeros(max(m + 1, 2))
    out[0], out[1] = float(ai), float(aip)
    for k in range(0, m - 1):
        out[k + 2] = t * out[k] + (k * out[k - 1] if k >= 1 else 0.0)
    return out[: m + 1]


def airy_seed_values() -> tuple[float, float]:
    """Closed forms of Ai(0) and Ai'(0)."""
    return 3 ** (-2 / 3) / gamma(2 / 3), -(3 ** (-1 / 3)) / gamma(1 / 3)
