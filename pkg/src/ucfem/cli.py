"""Command line entry point ``uc-fem``."""
from __future__ import annotations

import argparse
import logging
import sys

from .experiment import PRESETS, fit_rate_table, make_config, run_experiment
from .system import SolverError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uc-fem", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a convergence study")
    run.add_argument("--preset", choices=PRESETS, required=True)
    run.add_argument("--n-list", type=_int_list, default=None,
                     help="mesh sizes, e.g. 20,40,80,160")
    run.add_argument("--N", type=int, default=None, help="trace space dimension")
    run.add_argument("--gamma", type=_float_list, default=None,
                     help="stabiliser weight(s), e.g. 0 or 1,1e-2")
    run.add_argument("--solution", default=None, help="solution id for --preset custom")
    run.add_argument("--delta", type=float, default=0.0, help="data noise level")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default="results")
    run.add_argument("--dump-matrix", action="store_true",
                     help="write each system matrix in Matrix Market format")
    run.add_argument("--trace-modes", choices=("interpolated", "exact"), default="interpolated")
    run.add_argument("--timing", action="store_true",
                     help="record wall time in the CSV (makes it non-reproducible)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        config = make_config(
            args.preset, n_list=args.n_list, N=args.N, gamma=args.gamma,
            solution=args.solution, delta=args.delta, seed=args.seed, out=args.out,
            dump_matrix=args.dump_matrix, trace_modes=args.trace_modes, timing=args.timing,
        )
    except (ValueError, TypeError) as exc:
        print(f"uc-fem: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run_experiment(config)
    except SolverError as exc:
        print(f"uc-fem: solver failure (residual {exc.residual:.3e}): {exc}", file=sys.stderr)
        return EXIT_SOLVER
    for line in fit_rate_table(result):
        print(line)
    print(f"wrote {result.csv_path} and {result.svg_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
