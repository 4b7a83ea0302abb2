"""Compare the numba kernels with the pure Python/numpy fallback.

Each path runs in its own interpreter because the choice is made at import
time from QTREFFTZ_DISABLE_NUMBA. Usage: python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _best(fn, repeat: int) -> float:
    fn()  # warm-up (includes JIT compilation or cache load)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def child(repeat: int) -> dict:
    import numpy as np

    from qtrefftz import _kernels
    from qtrefftz.approximation import approximate_at_center, default_h_grid
    from qtrefftz.basis_eval import assemble_matrix, evaluate_many
    from qtrefftz.coefficients import OperatorCase, builtin_operator
    from qtrefftz.construct import build_basis
    from qtrefftz.exact_solutions import test_case
    from qtrefftz.multiindex import index_set
    from qtrefftz.taylor import TaylorTable

    coeffs = builtin_operator(OperatorCase.CONVECTED_AIRY, 2.0, 0.2, (0.1, 0.2, 0.3), 8)
    rng = np.random.default_rng(0)
    idx = index_set(8)
    a = TaylorTable((0, 0, 0), 8, rng.normal(size=idx.count) + 1j * rng.normal(size=idx.count))
    phase = build_basis(coeffs, 6, "phase")
    pts = rng.normal(size=(2000, 3)) * 0.1
    tc = test_case("tc2")
    center = tc.centers(1)[0]

    cases = {
        "taylor_product(order 8)": lambda: a * a,
        "build_basis(amplitude, n=6)": lambda: build_basis(coeffs, 6, "amplitude"),
        "build_basis(phase, n=6)": lambda: build_basis(coeffs, 6, "phase"),
        "build_basis(polynomial, n=6)": lambda: build_basis(coeffs, 6, "polynomial"),
        "assemble_matrix(phase, n=6)": lambda: assemble_matrix(phase, 6),
        "evaluate 49 fns x 2000 pts": lambda: [evaluate_many(b, pts, displaced=True) for b in phase],
        "one center, tc2 polynomial n=4": lambda: approximate_at_center(tc, "polynomial", 4, center,
                                                                       default_h_grid()),
    }
    return {"numba": _kernels.NUMBA_ENABLED, "times": {k: _best(f, repeat) for k, f in cases.items()}}


def main() -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args()
    if args.child:
        print(json.dumps(child(args.repeat)))
        return
    results = {}
    for label, flag in (("numba", "0"), ("fallback", "1")):
        env = dict(os.environ, QTREFFTZ_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(args.repeat)],
                             env=env, check=True, capture_output=True, text=True).stdout
        results[label] = json.loads(out.strip().splitlines()[-1])
    if not results["numba"]["numba"]:
        print("numba is not importable; both columns use the fallback")
    names = list(results["numba"]["times"])
    width = max(len(n) for n in names) + 2
    print(f"{'kernel'.ljust(width)}{'numba [ms]':>12}{'fallback [ms]':>15}{'speed-up':>10}")
    for n in names:
        tn = results["numba"]["times"][n] * 1e3
        tf = results["fallback"]["times"][n] * 1e3
        print(f"{n.ljust(width)}{tn:12.3f}{tf:15.3f}{tf / tn:10.1f}")


if __name__ == "__main__":
    main()
