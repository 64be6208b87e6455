"""Command-line front end: ``escalier fit | bench | plotdata``.

Exit codes: 0 success, 2 usage or parse errors, 3 brute-force budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import SuiteError, plot_csv, records_to_csv, records_to_json, resolve_function, run_suite, format_row
from .brute import BudgetExceeded, brute_force_fit, brute_force_fit_parallel
from .functions import Interval, UnknownFunctionError
from .linear import FitResult
from .solver import ConfigError, SolverConfig, escalier_fit, escalier_fit_parallel

EXIT_USAGE = 2
EXIT_BUDGET = 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="escalier", description="Optimal step-function fits and benchmarks.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit one target and print the result as JSON")
    f.add_argument("--function", required=True, help="zoo id f1..f8, or 'random' with --seed")
    f.add_argument("--a", type=float, default=0.0)
    f.add_argument("--b", type=float, default=2.0)
    f.add_argument("--steps", type=int, default=3)
    f.add_argument("--precision", type=float, default=1e-3)
    f.add_argument("--tolerance", type=float, default=1e-3)
    f.add_argument("--workers", type=int, default=1)
    f.add_argument("--algorithm", choices=("escalier", "brute"), default="escalier")
    f.add_argument("--seed", type=int, default=None, help="seed for random step targets")
    f.add_argument("--target-steps", type=int, default=1, help="jumps in a random step target")

    b = sub.add_parser("bench", help="run a suite file, write CSV and JSON records")
    b.add_argument("suite", type=Path)
    b.add_argument("--out", type=Path, default=None, help="output prefix (default: suite path without suffix)")
    b.add_argument("--quiet", action="store_true")

    d = sub.add_parser("plotdata", help="sample a fit JSON into x,f,g rows for plotting")
    d.add_argument("fit", type=Path)
    d.add_argument("--samples", type=int, default=200)
    d.add_argument("--out", type=Path, default=None)
    return p


def _fail(msg: str, code: int) -> int:
    print(f"escalier: error: {msg}", file=sys.stderr)
    return code


def _cmd_fit(args) -> int:
    try:
        interval = Interval(args.a, args.b)
        fn = resolve_function(args.function, args.seed, args.target_steps, interval)
        if args.algorithm == "escalier":
            cfg = SolverConfig(precision=args.precision, tolerance=args.tolerance,
                               max_steps=args.steps, workers=args.workers)
            solve = escalier_fit_parallel if args.workers > 1 else escalier_fit
            fit = solve(fn, interval, cfg)
        elif args.workers > 1:
            fit = brute_force_fit_parallel(fn, interval, args.steps, args.precision, args.workers)
        else:
            fit = brute_force_fit(fn, interval, args.steps, args.precision)
    except BudgetExceeded as exc:
        return _fail(str(exc), EXIT_BUDGET)
    except (UnknownFunctionError, ConfigError, ValueError) as exc:
        return _fail(str(exc).strip("'\""), EXIT_USAGE)
    print(fit.to_json())
    return 0


def _cmd_bench(args) -> int:
    try:
        text = args.suite.read_text()
    except OSError as exc:
        return _fail(f"cannot read suite: {exc}", EXIT_USAGE)
    log = None if args.quiet else (lambda line: print(line, flush=True))
    try:
        records = run_suite(text, log=log)
    except SuiteError as exc:
        return _fail(f"malformed suite: {exc}", EXIT_USAGE)
    prefix = args.out if args.out is not None else args.suite.with_suffix("")
    Path(f"{prefix}.csv").write_text(records_to_csv(records))
    Path(f"{prefix}.json").write_text(records_to_json(records) + "\n")
    return 0


def _cmd_plotdata(args) -> int:
    try:
        fit = FitResult.from_dict(json.loads(args.fit.read_text()))
        fn = resolve_function(fit.function, interval=fit.partition.interval)
        text = plot_csv(fn, fit, args.samples)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        return _fail(f"cannot use fit file {args.fit}: {exc}", EXIT_USAGE)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    return {"fit": _cmd_fit, "bench": _cmd_bench, "plotdata": _cmd_plotdata}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
