"""Command-line front end: ``symmod verify | search | demo``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .matcore import MatrixError
from .probe import TARGETS
from .report import (
    SEED_ENV,
    SUITES,
    INPUT_ONLY,
    RunConfig,
    default_seed,
    load_matrix_file,
    render,
    run_search,
    run_verify,
    verify_matrices,
)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _fmt(M: np.ndarray) -> str:
    M = np.where(np.abs(M) < 5e-16, 0, M)
    if np.allclose(M.imag, 0):
        M = M.real
    return np.array2string(np.asarray(M), precision=4, suppress_small=True)


def demo() -> str:
    from .moduli import abs_left, abs_right, qsym_modulus, sym_modulus
    from .theorems import BETA_GRID
    from .witness import geomean_witness, main_theorem_witness, polar_hermitian_cert

    N = np.array([[0.0, 1.0], [0.0, 0.0]])
    w = main_theorem_witness([N])
    cert = polar_hermitian_cert(N)
    _, gm = geomean_witness([N])
    lines = [
        "Nilpotent example Z = [[0, 1], [0, 0]]",
        "",
        f"|Z|      =\n{_fmt(abs_right(N))}",
        f"|Z*|     =\n{_fmt(abs_left(N))}",
        f"|Z|_sym  =\n{_fmt(sym_modulus(N))}",
        f"|Z|_qsym =\n{_fmt(qsym_modulus(N))}",
        "",
        "Orbit bound with the polar unitary V of Z (valid for every beta > 0):",
        f"V =\n{_fmt(w.V)}",
    ]
    for b in BETA_GRID:
        lines.append(f"  beta = {b:.4g}: margin lam_min(RHS - LHS) = {w.margin(b):+.3e}")
    lines += [
        "  (at beta = 1/2 both sides equal I/2, so the margin is 0)",
        "",
        "Polar-Hermitian certificate (Z is singular: only the canonical",
        "completion of the polar factor is examined, a positive answer is valid):",
        f"  is_ph = {cert.is_ph}, theta = {cert.theta:.4f}, residual = {cert.residual:.1e}",
        f"W =\n{_fmt(cert.W)}",
        f"Geometric-mean bound |Z|_sym <= M # WMW: margin = {gm:+.3e}",
    ]
    return "\n".join(lines)


def _emit(report: dict, fmt: str, out: str | None) -> None:
    text = render(report, fmt)
    if out:
        Path(out).write_text(text)
    else:
        print(text)


def _summary(report: dict) -> str:
    rows = []
    for sid, a in report["aggregates"].items():
        ext = a["max_ratio"] if a["max_ratio"] is not None else a["worst_margin"]
        label = "max ratio" if a["max_ratio"] is not None else "worst margin"
        ext_s = f"{ext:.6g}" if isinstance(ext, float) else str(ext)
        rows.append(f"{sid:<14} trials={a['trials']:<6} pass_rate={a['pass_rate']:.4f} "
                    f"{label}={ext_s}")
    return "\n".join(rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symmod", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default="all",
                   help=f"all, {', '.join(SUITES)}; with --input also {', '.join(INPUT_ONLY)}")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--dims", type=_ints, default=list(range(1, 9)))
    v.add_argument("--m", dest="m_values", type=_ints, default=[1, 2, 3, 4])
    v.add_argument("--seed", type=int, default=None,
                   help=f"root seed (default: ${SEED_ENV} or 0)")
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--out")
    v.add_argument("--format", choices=["json", "csv-summary"], default="json")
    v.add_argument("--workers", type=int, default=1)
    v.add_argument("--input", help="JSON matrix file; runs the statement once on it")

    s = sub.add_parser("search", help="run a sharpness/counterexample search")
    s.add_argument("--target", required=True, choices=TARGETS)
    s.add_argument("--budget", type=int, default=10000)
    s.add_argument("--dim", type=int, default=None)
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out")

    sub.add_parser("demo", help="print the nilpotent worked example")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "demo":
            print(demo())
            return 0
        seed = default_seed() if args.seed is None else args.seed
        if args.command == "search":
            dim = args.dim or {"opnorm-triangle-failure-m2": 2, "quarter-sharpness-m3": 3}.get(
                args.target, 3)
            report = run_search(args.target, args.budget, dim, args.m, seed)
            _emit(report, "json", args.out)
            print(f"{args.target}: best_value={report['result']['best_value']:.10g} "
                  f"(budget used {report['result']['budget_used']})", file=sys.stderr)
            return 0 if report["ok"] else 1
        if args.input:
            report = verify_matrices(args.suite, load_matrix_file(args.input), args.tol, seed)
        else:
            cfg = RunConfig(suite=args.suite, trials=args.trials, dims=args.dims,
                            m_values=args.m_values, seed=seed, tol=args.tol, out=args.out,
                            format=args.format, workers=args.workers)
            report = run_verify(cfg)
        _emit(report, args.format, args.out)
        print(_summary(report), file=sys.stderr)
        return 0 if report["ok"] else 1
    except (MatrixError, ValueError, OSError) as exc:
        print(f"symmod: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
