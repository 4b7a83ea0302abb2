"""Layer-by-layer construction of quasi-Trefftz functions.

Every family solves the same triangular subsystem on each layer: the
unknowns with first component >= 2 are obtained one at a time by explicit
substitution, the others are fixed by the initialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from pathlib import Path

import numpy as np

from . import _kernels
from .basis import BasisFunction, Family
from .coefficients import PdeCoefficients
from .multiindex import compare_prec, count_upto, index_set, layer, numbering, upto
from .operator_core import SecondOrderStructure, check_hypothesis


@dataclass(frozen=True)
class Direction:
    l: int
    m: int
    theta: float
    phi: float
    d: np.ndarray


@dataclass(frozen=True)
class DirectionSet:
    n: int
    entries: tuple

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def vectors(self) -> np.ndarray:
        return np.array([e.d for e in self.entries])


def generate_directions(n: int) -> DirectionSet:
    """(n+1)^2 unit vectors: theta_l = pi(l+1)/(n+2), phi_lm = 2 pi (m+l)/(2l+1)."""
    if n < 1:
        raise ValueError("direction sets need n >= 1")
    out = []
    for l in range(n + 1):
        theta = np.pi * (l + 1) / (n + 2)
        for m in range(-l, l + 1):
            phi = 2 * np.pi * (m + l) / (2 * l + 1)
            d = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
            out.append(Direction(l, m, theta, phi, d))
    return DirectionSet(n, tuple(out))


def quasi_trefftz_order(n: int) -> int:
    return max(n - 1, 1)


def default_s(coeffs: PdeCoefficients) -> complex:
    """``i * sqrt(|c_0(x_C)|)``, i.e. ``i kappa`` for the Helmholtz-type operators."""
    return 1j * np.sqrt(abs(coeffs.value((0, 0, 0))))


# subsystem

def _principal_values(coeffs: PdeCoefficients) -> np.ndarray:
    return np.ascontiguousarray(coeffs.principal())


def solve_subsystem(ell: int, B: dict, principal, fixed: dict | None = None) -> dict:
    """Layer ``ell + 2`` solution of the triangular subsystem with right-hand side ``B``.

    ``principal`` holds the center values of the d11, d22, d33, d12, d13, d23
    coefficients. Entries of ``fixed`` (first component 0 or 1) are copied;
    missing ones are zero.
    """
    principal = np.asarray(principal, dtype=np.complex128)
    if principal[0] == 0:
        raise ZeroDivisionError("zero pivot: the d11 coefficient vanishes at the center")
    idx = index_set(ell + 2)
    xi = np.zeros(idx.count, dtype=np.complex128)
    rhs = np.zeros(idx.count, dtype=np.complex128)
    for i, v in (fixed or {}).items():
        if sum(i) != ell + 2 or i[0] > 1:
            raise ValueError(f"{tuple(i)} is not a free slot of layer {ell + 2}")
        xi[numbering(i)] = v
    for b, v in B.items():
        if sum(b) != ell:
            raise ValueError(f"{tuple(b)} is not in layer {ell}")
        rhs[numbering(b)] = v
    _kernels.solve_layer(ell, rhs, xi, principal, idx.lookup)
    return {tuple(int(v) for v in i): complex(xi[numbering(i)]) for i in layer(ell + 2)}


# constructions

def _prepare(coeffs: PdeCoefficients, q: int) -> SecondOrderStructure:
    if q < 1:
        raise ValueError("quasi-Trefftz order q must be >= 1")
    coeffs.require_order(q + 1)
    return check_hypothesis(coeffs)


def _seed(structure: SecondOrderStructure, s: complex, d) -> np.ndarray:
    d = np.asarray(d, dtype=float).reshape(3)
    return structure.seed_matrix(complex(s)) @ d


def _run_layers(q: int, coeffs: PdeCoefficients, xi: np.ndarray, rhs_kernel, *extra) -> int:
    idx = index_set(q + 1)
    cidx = index_set(coeffs.max_order)
    coef = np.ascontiguousarray(coeffs.tables)
    principal = _principal_values(coeffs)
    rhs = np.zeros(idx.count, dtype=np.complex128)
    touched = 0
    for ell in range(q):
        rhs_kernel(ell, xi, *extra, coef, idx.lookup, cidx.lookup, rhs)
        touched += _kernels.solve_layer(ell, rhs, xi, principal, idx.lookup)
    return touched


def construct_amplitude_gpw(coeffs: PdeCoefficients, q: int, s: complex, d) -> BasisFunction:
    structure = _prepare(coeffs, q)
    lam = _seed(structure, s, d)
    mu = np.zeros(count_upto(q + 1), dtype=np.complex128)
    mu[0] = 1.0
    _run_layers(q, coeffs, mu, _kernels.layer_rhs_amplitude, lam)
    return BasisFunction(Family.AMPLITUDE, coeffs.center, q, mu, lam=lam, direction=_meta(d, s))


def construct_phase_gpw(coeffs: PdeCoefficients, q: int, s: complex, d) -> BasisFunction:
    structure = _prepare(coeffs, q)
    lam = np.zeros(count_upto(q + 1), dtype=np.complex128)
    lam[1:4] = _seed(structure, s, d)
    _run_layers(q, coeffs, lam, _kernels.layer_rhs_phase)
    return BasisFunction(Family.PHASE, coeffs.center, q, lam, direction=_meta(d, s))


def polynomial_seeds(q: int) -> list:
    """Free slots ``|j| <= q+1`` with ``j1 in {0, 1}``, sorted by the layer order."""
    seeds = [tuple(int(v) for v in j) for j in upto(q + 1) if j[0] <= 1]
    return sorted(seeds, key=cmp_to_key(lambda a, b: int(compare_prec(a, b))))


def construct_polynomial_qt(coeffs: PdeCoefficients, q: int, seed) -> BasisFunction:
    seed = tuple(int(v) for v in seed)
    if len(seed) != 3 or min(seed) < 0 or seed[0] > 1 or sum(seed) > q + 1:
        raise ValueError(f"invalid seed {seed} for q={q}: need seed1 in {{0,1}} and |seed| <= q+1")
    _prepare(coeffs, q)
    nu = np.zeros(count_upto(q + 1), dtype=np.complex128)
    nu[numbering(seed)] = 1.0
    _run_layers(q, coeffs, nu, _kernels.layer_rhs_polynomial)
    return BasisFunction(Family.POLYNOMIAL, coeffs.center, q, nu)


def _meta(d, s) -> tuple:
    d = np.asarray(d, dtype=float)
    theta = float(np.arccos(np.clip(d[2], -1.0, 1.0)))
    phi = float(np.arctan2(d[1], d[0]) % (2 * np.pi))
    return (theta, phi, complex(s))


def build_basis(coeffs: PdeCoefficients, n: int, family, s: complex | None = None) -> list:
    """(n+1)^2 functions of order ``q = max(n-1, 1)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    family = Family(family)
    q = quasi_trefftz_order(n)
    p = (n + 1) ** 2
    if family is Family.POLYNOMIAL:
        return [construct_polynomial_qt(coeffs, q, j) for j in polynomial_seeds(q)[:p]]
    s = default_s(coeffs) if s is None else s
    make = construct_amplitude_gpw if family is Family.AMPLITUDE else construct_phase_gpw
    return [make(coeffs, q, s, e.d) for e in generate_directions(n)]


def plane_wave_basis(center, n: int, kappa: float) -> list:
    """Classical plane waves ``exp(i kappa d . (x - x_C))`` on the same direction set."""
    q = quasi_trefftz_order(n)
    poly = np.zeros(count_upto(q + 1), dtype=np.complex128)
    poly[0] = 1.0
    return [BasisFunction(Family.AMPLITUDE, center, q, poly, lam=1j * kappa * e.d, direction=_meta(e.d, 1j * kappa))
            for e in generate_directions(n)]


# text format

def format_basis(basis: list) -> str:
    lines = []
    if basis:
        lines.append("CENTER " + " ".join(repr(float(v)) for v in basis[0].center))
    for b in basis:
        entries = " ".join(
            f"{i[0]} {i[1]} {i[2]} {float(v.real)!r} {float(v.imag)!r}"
            for i, v in zip(index_set(b.degree).mi, b.poly)
        )
        lines.append(f"{b.family.value} {b.q} | {entries}")
        if b.family is Family.AMPLITUDE:
            lines.append("LAMBDA " + " ".join(f"{float(v.real)!r} {float(v.imag)!r}" for v in b.lam))
    return "\n".join(lines) + "\n"


def dump_basis(basis: list, path) -> None:
    Path(path).write_text(format_basis(basis))


def load_basis(path) -> list:
    center = (0.0, 0.0, 0.0)
    out: list = []
    pending = None

    def flush():
        if pending is not None:
            fam, q, poly, lam = pending
            out.append(BasisFunction(fam, center, q, poly, lam=lam))

    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("CENTER"):
            center = tuple(float(v) for v in line.split()[1:4])
            continue
        if line.startswith("LAMBDA"):
            if pending is None or pending[0] is not Family.AMPLITUDE:
                raise ValueError(f"{path}:{lineno}: LAMBDA without an amplitude function")
            v = [float(t) for t in line.split()[1:]]
            pending = (*pending[:3], np.array(v[0::2]) + 1j * np.array(v[1::2]))
            continue
        flush()
        head, _, body = line.partition("|")
        fam, q = head.split()
        fam, q = Family(fam), int(q)
        poly = np.zeros(count_upto(q + 1), dtype=np.complex128)
        tok = body.split()
        if len(tok) % 5:
            raise ValueError(f"{path}:{lineno}: expected groups of 'i1 i2 i3 re im'")
        for k in range(0, len(tok), 5):
            i = tuple(int(t) for t in tok[k:k + 3])
            poly[numbering(i)] = complex(float(tok[k + 3]), float(tok[k + 4]))
        pending = (fam, q, poly, None)
    flush()
    return out
