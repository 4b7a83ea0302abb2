"""Taylor-matching fits of exact solutions and the error/conditioning measurements."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from .basis_eval import BasisMatrix, assemble_matrix, evaluate_many, gradient_many
from .construct import build_basis, plane_wave_basis, quasi_trefftz_order
from .exact_solutions import CaseId, TestCase, solution_gradients, solution_taylor, solution_values
from .multiindex import count_upto
from .taylor import TaylorTable

SLOPE_WINDOW = (1e-13, 1e-2)
DEFAULT_SAMPLES = 50
RADII = (1.0, 0.5, 0.25)


class ApproxFamily(str, Enum):
    AMPLITUDE = "amplitude"
    PHASE = "phase"
    POLYNOMIAL = "polynomial"
    PW = "pw"

    @property
    def column_prefix(self) -> str:
        return {"amplitude": "errAbGn", "phase": "errPbGn", "polynomial": "errPstn", "pw": "errPWfn"}[self.value]


class SingularSystemWarning(RuntimeWarning):
    pass


@dataclass
class ApproxReport:
    family: ApproxFamily
    n: int
    case: CaseId
    h: list
    max_errors: list
    gradient_errors: list
    cond: float
    fitted_order: float | None = None
    gradient_order: float | None = None
    asymptotic_order: float | None = None
    per_center_cond: list = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.h) == len(self.max_errors) == len(self.gradient_errors)):
            raise ValueError("h and error lists must have equal length")
        if any(b >= a for a, b in zip(self.h, self.h[1:])):
            raise ValueError("h values must be strictly decreasing")


def solution_rhs(u: TaylorTable, n: int) -> np.ndarray:
    if u.order < n:
        raise ValueError(f"solution table has order {u.order}, need {n}")
    return np.array(u.coeffs[: count_upto(n)])


def _entries(M) -> np.ndarray:
    return M.entries if isinstance(M, BasisMatrix) else np.asarray(M, dtype=np.complex128)


def fit(M, F, method: str = "normal") -> np.ndarray:
    """Weights ``x`` with ``M x ~ F``.

    ``normal`` solves ``M^H M x = M^H F`` by a Hermitian symmetric-indefinite
    factorization; ``qr`` is a least-squares diagnostic path. An exactly
    singular normal matrix falls back to least squares with a warning.
    """
    A = _entries(M)
    F = np.asarray(F, dtype=np.complex128)
    if A.shape[1] > A.shape[0]:
        raise ValueError("more basis functions than Taylor rows")
    if method == "qr":
        return scipy.linalg.lstsq(A, F)[0]
    if method != "normal":
        raise ValueError(f"unknown method {method!r}")
    N = A.conj().T @ A
    rhs = A.conj().T @ F
    try:
        with warnings.catch_warnings():
            # ill-conditioning is expected at high n and is reported by condition_number
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            return scipy.linalg.solve(N, rhs, assume_a="her")
    except np.linalg.LinAlgError:
        warnings.warn("singular normal matrix, using least squares", SingularSystemWarning, stacklevel=2)
        return np.linalg.lstsq(N, rhs, rcond=None)[0]


def condition_number(M) -> float:
    """2-norm condition of ``M^H M``; inf when its smallest singular value is below 1e-300."""
    A = _entries(M)
    sv = np.linalg.svd(A.conj().T @ A, compute_uv=False)
    if sv[-1] < 1e-300:
        return float("inf")
    return float(sv[0] / sv[-1])


def fibonacci_sphere(samples: int) -> np.ndarray:
    k = np.arange(samples) + 0.5
    z = 1 - 2 * k / samples
    r = np.sqrt(1 - z * z)
    phi = np.pi * (3 - np.sqrt(5)) * k
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def ball_displacements(h: float, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    if h <= 0:
        raise ValueError("h must be positive")
    if samples < DEFAULT_SAMPLES:
        raise ValueError(f"need at least {DEFAULT_SAMPLES} samples")
    dirs = fibonacci_sphere(samples)
    return np.vstack([np.zeros((1, 3))] + [h * r * dirs for r in RADII])


def _approximant(basis, weights, dx, grad: bool) -> np.ndarray:
    fn = gradient_many if grad else evaluate_many
    return sum(w * fn(b, dx, displaced=True) for w, b in zip(weights, basis))


def max_error_on_ball(u_exact, basis, weights, center, h: float, samples: int = DEFAULT_SAMPLES) -> float:
    """``max |u - sum w_l b_l|`` on the center and three spheres of radii h, h/2, h/4.

    ``u_exact`` maps an ``(N, 3)`` array of points to values.
    """
    dx = ball_displacements(h, samples)
    exact = np.asarray(u_exact(np.asarray(center, dtype=float) + dx))
    with np.errstate(all="ignore"):
        err = np.abs(exact - _approximant(basis, weights, dx, False))
    return _finite_max(err)


def gradient_error_on_ball(grad_exact, basis, weights, center, h: float, samples: int = DEFAULT_SAMPLES) -> float:
    """Largest Euclidean norm of the gradient mismatch on the same point set."""
    dx = ball_displacements(h, samples)
    exact = np.asarray(grad_exact(np.asarray(center, dtype=float) + dx))
    with np.errstate(all="ignore"):
        err = np.linalg.norm(exact - _approximant(basis, weights, dx, True), axis=1)
    return _finite_max(err)


def _finite_max(err: np.ndarray) -> float:
    # exponentials of high-degree phases overflow on large balls; that is an infinite error
    return float(np.max(err)) if np.all(np.isfinite(err)) else float("inf")


class TooFewPoints(ValueError):
    pass


def fit_convergence_order(h, err, window=SLOPE_WINDOW) -> float:
    """Least-squares slope of ``log err`` against ``log h`` over errors inside ``window``."""
    h = np.asarray(h, dtype=float)
    err = np.asarray(err, dtype=float)
    ok = (err > window[0]) & (err < window[1]) & (h > 0)
    if np.count_nonzero(ok) < 3:
        raise TooFewPoints("too few valid points for a slope fit")
    return float(np.polyfit(np.log(h[ok]), np.log(err[ok]), 1)[0])


def floor_trimmed_order(h, err, window=SLOPE_WINDOW, factor: float = 30.0) -> float:
    """Diagnostic slope that also drops errors within ``factor`` of the smallest one.

    Wave bases stall at a conditioning floor that can sit above the window's
    lower edge; this fit measures the decay before the stall.
    """
    err = np.asarray(err, dtype=float)
    finite = err[np.isfinite(err)]
    floor = float(finite.min()) if finite.size else 0.0
    return fit_convergence_order(h, err, (max(window[0], factor * floor), window[1]))


def default_h_grid(levels: int = 11) -> list:
    return [2.0 * 4.0 ** (-k) for k in range(levels)]


def make_basis(tc: TestCase, family, n: int, center) -> list:
    family = ApproxFamily(family)
    if family is ApproxFamily.PW:
        if tc.id is not CaseId.TC1:
            raise ValueError("plane waves are only offered for the constant-coefficient case")
        return plane_wave_basis(center, n, tc.kappa)
    coeffs = tc.operator(center, quasi_trefftz_order(n) + 1)
    return build_basis(coeffs, n, family.value)


@dataclass
class CenterResult:
    errors: list
    gradient_errors: list
    cond: float


def approximate_at_center(tc: TestCase, family, n: int, center, hs, samples: int = DEFAULT_SAMPLES,
                          method: str = "normal") -> CenterResult:
    center = np.asarray(center, dtype=float)
    basis = make_basis(tc, family, n, center)
    M = assemble_matrix(basis, n)
    F = solution_rhs(solution_taylor(tc, center, n), n)
    w = fit(M, F, method)

    def u(x):
        return solution_values(tc, x)

    def gu(x):
        return solution_gradients(tc, x)

    errs = [max_error_on_ball(u, basis, w, center, h, samples) for h in hs]
    gerrs = [gradient_error_on_ball(gu, basis, w, center, h, samples) for h in hs]
    return CenterResult(errs, gerrs, condition_number(M))


def _safe_order(h, err, fn=fit_convergence_order):
    try:
        return fn(h, err)
    except TooFewPoints:
        return None


def convergence_report(tc: TestCase, family, n: int, centers, hs=None, samples: int = DEFAULT_SAMPLES,
                       method: str = "normal", executor=None) -> ApproxReport:
    """Worst case over ``centers`` for each h, plus the fitted orders."""
    hs = default_h_grid() if hs is None else list(hs)
    args = [(tc, family, n, c, hs, samples, method) for c in np.atleast_2d(centers)]
    if executor is None:
        results = [approximate_at_center(*a) for a in args]
    else:
        results = list(executor.map(_star_approximate, args))
    errs = np.max([r.errors for r in results], axis=0).tolist()
    gerrs = np.max([r.gradient_errors for r in results], axis=0).tolist()
    conds = [r.cond for r in results]
    return ApproxReport(ApproxFamily(family), n, tc.id, hs, errs, gerrs, max(conds),
                        fitted_order=_safe_order(hs, errs), gradient_order=_safe_order(hs, gerrs),
                        asymptotic_order=_safe_order(hs, errs, floor_trimmed_order), per_center_cond=conds)


def _star_approximate(a):
    return approximate_at_center(*a)


def conditioning(tc: TestCase, family, n: int, centers) -> float:
    """Worst condition number of ``M^H M`` over ``centers``."""
    return max(condition_number(assemble_matrix(make_basis(tc, family, n, c), n)) for c in np.atleast_2d(centers))
