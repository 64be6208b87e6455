"""Experiment harness: suite files, timing, and CSV/JSON record output.

A suite file is INI-style plain text.  Each section is one grid; every
combination of the listed values becomes a row::

    [table3a]
    functions = f1, f3, f6, f7
    algorithms = escalier, brute
    precisions = 1e-2, 1e-3, 1e-4
    tolerances = 1e-3
    steps = 2
    workers = 1
    repetitions = 3
    a = 0
    b = 2

Brute force ignores the tolerance, so it contributes one row per
(function, precision, steps, workers) whatever the tolerance list.
"""

from __future__ import annotations

import configparser
import csv
import io
import itertools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .brute import BudgetExceeded, brute_force_fit, brute_force_fit_parallel
from .functions import Interval, TargetFunction, random_step_function, zoo_lookup
from .linear import FitResult, encode_real, decode_real, evaluate_escalier
from .solver import SolverConfig, escalier_fit, escalier_fit_parallel

ALGORITHMS = ("escalier", "escalier-parallel", "brute", "brute-parallel")

CSV_COLUMNS = (
    "function", "algorithm", "precision", "tolerance", "max_steps", "workers",
    "ess", "r2", "runtime_ms", "knots", "repetitions", "status",
)

SUITE_KEYS = {
    "functions", "algorithms", "precisions", "tolerances", "steps",
    "workers", "repetitions", "a", "b",
}


class SuiteError(ValueError):
    pass


@dataclass
class BenchRecord:
    function: str
    algorithm: str
    precision: float
    tolerance: Optional[float]
    max_steps: int
    workers: int
    knots: list = field(default_factory=list)
    ess: Optional[float] = None
    r2: Optional[float] = None
    runtime_ms: Optional[float] = None
    repetitions: int = 1
    status: str = "ok"

    def to_json_dict(self) -> dict:
        return {
            "function": self.function,
            "algorithm": self.algorithm,
            "precision": self.precision,
            "tolerance": self.tolerance,
            "max_steps": self.max_steps,
            "workers": self.workers,
            "ess": encode_real(self.ess),
            "r2": encode_real(self.r2),
            "runtime_ms": self.runtime_ms,
            "knots": list(self.knots),
            "repetitions": self.repetitions,
            "status": self.status,
        }


def measure_runtime(thunk: Callable[[], object], repetitions: int = 3) -> float:
    """Mean wall-clock milliseconds of ``thunk()`` over ``repetitions`` runs."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    total = 0.0
    for _ in range(repetitions):
        t0 = time.perf_counter()
        thunk()
        total += time.perf_counter() - t0
    return 1000.0 * total / repetitions


def resolve_function(name: str, seed: Optional[int] = None, target_steps: int = 1,
                     interval: Interval = Interval(0.0, 2.0)) -> TargetFunction:
    """Zoo id, or ``random`` (needs ``seed``), or a ``random:<seed>:<steps>`` id."""
    if name.startswith("random:"):
        _, s, k = name.split(":")
        return random_step_function(int(s), int(k), interval)
    if name == "random":
        if seed is None:
            raise ValueError("random targets need a seed")
        return random_step_function(seed, target_steps, interval)
    return zoo_lookup(name)


def run_cell(fn: TargetFunction, algorithm: str, interval: Interval, precision: float,
             tolerance: Optional[float], steps: int, workers: int, repetitions: int) -> BenchRecord:
    rec = BenchRecord(fn.id, algorithm, precision, tolerance, steps, workers, repetitions=repetitions)
    if algorithm.startswith("escalier"):
        cfg = SolverConfig(precision=precision, tolerance=tolerance, max_steps=steps, workers=workers)
        solve = escalier_fit if algorithm == "escalier" else escalier_fit_parallel
        job = lambda: solve(fn, interval, cfg)
    elif algorithm == "brute":
        job = lambda: brute_force_fit(fn, interval, steps, precision)
    elif algorithm == "brute-parallel":
        job = lambda: brute_force_fit_parallel(fn, interval, steps, precision, workers)
    else:
        raise SuiteError(f"unknown algorithm {algorithm!r}")
    out = []
    try:
        rec.runtime_ms = measure_runtime(lambda: out.append(job()), repetitions)
    except BudgetExceeded:
        rec.status = "budget-exceeded"
        return rec
    fit: FitResult = out[-1]
    rec.knots = list(fit.knots)
    rec.ess = fit.ess
    rec.r2 = fit.r2
    return rec


def _floats(s):
    return [float(v) for v in _items(s)]


def _ints(s):
    return [int(v) for v in _items(s)]


def _items(s):
    return [v.strip() for v in s.replace("\n", ",").split(",") if v.strip()]


def parse_suite(text: str) -> list[dict]:
    """Expand a suite file into a list of cell dicts in file order."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise SuiteError(str(exc)) from None
    cells = []
    for name in parser.sections():
        sec = parser[name]
        unknown = set(sec) - SUITE_KEYS
        if unknown:
            raise SuiteError(f"[{name}]: unknown keys {sorted(unknown)}")
        try:
            functions = _items(sec.get("functions", ""))
            algorithms = _items(sec.get("algorithms", "escalier"))
            precisions = _floats(sec.get("precisions", "1e-3"))
            tolerances = _floats(sec.get("tolerances", "1e-3"))
            steps = _ints(sec.get("steps", "3"))
            workers = _ints(sec.get("workers", "1"))
            repetitions = int(sec.get("repetitions", "1"))
            interval = Interval(float(sec.get("a", "0")), float(sec.get("b", "2")))
        except ValueError as exc:
            raise SuiteError(f"[{name}]: {exc}") from None
        for alg in algorithms:
            if alg not in ALGORITHMS:
                raise SuiteError(f"[{name}]: unknown algorithm {alg!r}")
        for fid, alg, prec, n, w in itertools.product(functions, algorithms, precisions, steps, workers):
            tols = [None] if alg.startswith("brute") else tolerances
            for tol in tols:
                cells.append(dict(function=fid, algorithm=alg, precision=prec, tolerance=tol,
                                  steps=n, workers=w, repetitions=repetitions, interval=interval))
    return cells


def run_suite(text: str, log: Optional[Callable[[str], None]] = None) -> list[BenchRecord]:
    cells = parse_suite(text)
    records = []
    for cell in cells:
        try:
            fn = resolve_function(cell["function"], interval=cell["interval"])
        except (KeyError, ValueError) as exc:
            raise SuiteError(str(exc)) from None
        rec = run_cell(fn, cell["algorithm"], cell["interval"], cell["precision"], cell["tolerance"],
                       cell["steps"], cell["workers"], cell["repetitions"])
        records.append(rec)
        if log:
            log(format_row(rec))
    return records


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return encode_real(x) if not math.isfinite(x) else f"{x:.17g}"
    return str(x)


def format_row(rec: BenchRecord) -> str:
    """Human-readable line, reals to 6 decimals."""
    r2 = "undefined" if rec.r2 is None else f"{rec.r2:.6f}"
    ess = "" if rec.ess is None else f"{rec.ess:.6f}"
    tol = "-" if rec.tolerance is None else f"{rec.tolerance:g}"
    ms = "" if rec.runtime_ms is None else f"{rec.runtime_ms:.0f}"
    knots = " ".join(f"{k:.6f}" for k in rec.knots)
    return (f"{rec.function:<6} {rec.algorithm:<18} prec={rec.precision:<7g} tol={tol:<6} n={rec.max_steps:<2} "
            f"w={rec.workers:<2} ess={ess:<10} r2={r2:<9} ms={ms:<7} {rec.status} [{knots}]")


def records_to_csv(records: list[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([
            r.function, r.algorithm, _fmt(r.precision), _fmt(r.tolerance), r.max_steps, r.workers,
            _fmt(r.ess), "undefined" if r.r2 is None and r.status == "ok" else _fmt(r.r2),
            _fmt(r.runtime_ms), ";".join(f"{k:.17g}" for k in r.knots), r.repetitions, r.status,
        ])
    return buf.getvalue()


def records_from_csv(text: str) -> list[BenchRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        opt = lambda s: None if s in ("", "undefined") else decode_real(s)
        out.append(BenchRecord(
            function=row["function"], algorithm=row["algorithm"], precision=float(row["precision"]),
            tolerance=opt(row["tolerance"]), max_steps=int(row["max_steps"]), workers=int(row["workers"]),
            knots=[float(k) for k in row["knots"].split(";") if k], ess=opt(row["ess"]), r2=opt(row["r2"]),
            runtime_ms=opt(row["runtime_ms"]), repetitions=int(row["repetitions"]), status=row["status"],
        ))
    return out


def records_to_json(records: list[BenchRecord]) -> str:
    return json.dumps([r.to_json_dict() for r in records], indent=1)


def plot_rows(fn: TargetFunction, fit: FitResult, samples: int):
    """(x, f(x), g(x)) rows: uniform samples plus left/right limits at each knot."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    a, b = fit.partition.interval.a, fit.partition.interval.b
    heights = np.asarray(fit.segment_means or np.cumsum(fit.coefficients))
    rows = [(float(x), 0, float(evaluate_escalier(fit, x))) for x in np.linspace(a, b, samples)]
    for i, k in enumerate(fit.knots):
        rows.append((k, -1, float(heights[i])))
        rows.append((k, 1, float(heights[i + 1])))
    rows.sort(key=lambda r: (r[0], r[1]))
    return [(x, fn.eval(x), g) for x, _, g in rows]


def plot_csv(fn: TargetFunction, fit: FitResult, samples: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "f", "g"))
    for x, f, g in plot_rows(fn, fit, samples):
        w.writerow((_fmt(float(x)), _fmt(float(f)), _fmt(float(g))))
    return buf.getvalue()
