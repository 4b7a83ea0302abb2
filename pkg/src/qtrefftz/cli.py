"""Command-line harness: convergence data, condition tables, invariant checks, basis dumps."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import checks
from .approximation import ApproxFamily, conditioning, convergence_report, default_h_grid
from .construct import build_basis, format_basis, plane_wave_basis, quasi_trefftz_order
from .exact_solutions import CENTER_SEED, CaseId, test_case

FAMILY_ORDER = (ApproxFamily.AMPLITUDE, ApproxFamily.PHASE, ApproxFamily.POLYNOMIAL, ApproxFamily.PW)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    case: CaseId
    families: list
    n_values: list
    h: list
    centers: int
    seed: int
    out: Path | None
    workers: int = 1

    def __post_init__(self):
        if not self.families:
            raise ConfigError("no families selected")
        if self.case is not CaseId.TC1 and ApproxFamily.PW in self.families:
            raise ConfigError("the plane-wave family is only available for tc1")
        if not self.n_values or min(self.n_values) < 1 or max(self.n_values) > 8:
            raise ConfigError("n values must lie in [1, 8]")
        if any(b >= a for a, b in zip(self.h, self.h[1:])):
            raise ConfigError("h values must be decreasing")
        if self.centers < 1:
            raise ConfigError("need at least one center")


def _parse_n(text: str) -> list:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return sorted(set(out))


def _parse_families(text: str | None, case: CaseId) -> list:
    if text is None:
        fams = list(FAMILY_ORDER)
        return fams if case is CaseId.TC1 else fams[:3]
    names = [t.strip().lower() for t in text.split(",") if t.strip()]
    try:
        chosen = {ApproxFamily(n) for n in names}
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return [f for f in FAMILY_ORDER if f in chosen]


def config_from_args(args) -> RunConfig:
    case = CaseId(args.case)
    n_default = "1-8" if args.full else "1-6"
    centers = args.centers if args.centers is not None else (50 if args.full else 10)
    return RunConfig(
        case=case,
        families=_parse_families(args.family, case),
        n_values=_parse_n(args.n or n_default),
        h=default_h_grid(args.h_levels),
        centers=centers,
        seed=args.seed,
        out=Path(args.out) if args.out else None,
        workers=args.workers,
    )


def _pool(workers: int):
    return ProcessPoolExecutor(max_workers=workers) if workers > 1 else nullcontext(None)


def _fmt(v: float) -> str:
    return f"{v:.6e}" if np.isfinite(v) else "inf"


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_convergence(cfg: RunConfig) -> int:
    tc = test_case(cfg.case)
    centers = tc.centers(cfg.centers, cfg.seed)
    columns, data, summary = [], [], []
    with _pool(cfg.workers) as pool:
        for fam in cfg.families:
            for n in cfg.n_values:
                r = convergence_report(tc, fam, n, centers, cfg.h, executor=pool)
                columns.append(f"{fam.column_prefix}{n}")
                data.append(r.max_errors)
                summary.append((fam.value, n, r.fitted_order, r.gradient_order, r.asymptotic_order))
    lines = [" ".join(["h"] + columns)]
    for k, h in enumerate(cfg.h):
        lines.append(" ".join([_fmt(h)] + [_fmt(col[k]) for col in data]))
    _emit("\n".join(lines) + "\n", cfg.out)
    for fam, n, order, gorder, aorder in summary:
        show = lambda v: "n/a" if v is None else f"{v:.2f}"  # noqa: E731
        print(f"# {fam:10s} n={n}: order {show(order)} (expected {n + 1}), gradient {show(gorder)}, "
              f"before floor {show(aorder)}", file=sys.stderr)
    return 0


def cmd_conditioning(cfg: RunConfig) -> int:
    tc = test_case(cfg.case)
    centers = tc.centers(cfg.centers, cfg.seed)
    table = {(f, n): conditioning(tc, f, n, centers) for f in cfg.families for n in cfg.n_values}
    header = ["n"] + [f.value for f in cfg.families]
    lines = [" ".join(header)]
    for n in cfg.n_values:
        lines.append(" ".join([str(n)] + [_fmt(table[f, n]) for f in cfg.families]))
    text = "\n".join(lines) + "\n"
    _emit(text, cfg.out)
    if cfg.out is not None:
        width = 14
        print("".join(h.rjust(width) for h in header))
        for n in cfg.n_values:
            print(str(n).rjust(width) + "".join(f"{table[f, n]:.2e}".rjust(width) for f in cfg.families))
    return 0


def cmd_verify(args) -> int:
    suite = checks.default_suite(perturb=args.perturb)
    if args.list:
        for c in suite:
            print(f"{c.name:28s} tol {c.tol:.0e}  {c.description}")
        return 0
    ok_all = True
    for c in suite:
        ok, worst = c.run()
        ok_all &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {c.name:28s} worst {worst:.3e}  tol {c.tol:.0e}")
    print("all checks passed" if ok_all else "some checks failed")
    return 0 if ok_all else 1


def cmd_dump_basis(args) -> int:
    tc = test_case(args.case)
    center = np.array(args.center if args.center else tc.centers(1, args.seed)[0], dtype=float)
    n = int(args.n or 2)
    fam = ApproxFamily(args.family or "polynomial")
    if fam is ApproxFamily.PW:
        basis = plane_wave_basis(center, n, tc.kappa)
    else:
        basis = build_basis(tc.operator(center, quasi_trefftz_order(n) + 1), n, fam.value)
    _emit(format_basis(basis), Path(args.out) if args.out else None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtrefftz", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--case", choices=[c.value for c in CaseId], default="tc1")
        sp.add_argument("--family", help="comma-separated: amplitude,phase,polynomial,pw")
        sp.add_argument("--n", help="e.g. 1-4 or 1,3,5")
        sp.add_argument("--seed", type=lambda s: int(s, 0), default=CENTER_SEED)
        sp.add_argument("--out", help="output file (default: stdout)")

    for name in ("convergence", "conditioning"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--centers", type=int)
        sp.add_argument("--full", action="store_true", help="n up to 8 and 50 centers")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--h-levels", type=int, default=11, help="h_k = 2*4^-k for k < levels")

    sp = sub.add_parser("verify")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--perturb", type=float, default=0.0,
                    help="perturb the operator used for construction by this amount")

    sp = sub.add_parser("dump-basis")
    common(sp)
    sp.add_argument("--center", type=float, nargs=3)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "dump-basis":
            return cmd_dump_basis(args)
        cfg = config_from_args(args)
        return cmd_convergence(cfg) if args.command == "convergence" else cmd_conditioning(cfg)
    except ConfigError as exc:
        print(f"qtrefftz: configuration error: {exc}", file=sys.stderr)
        return 2
