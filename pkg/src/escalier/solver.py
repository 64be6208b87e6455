"""Global step-function fit by sweep search over the first knot.

For every grid value of the first knot, the remaining knots are found by
walking the critical-point recurrence forward: each critical zone of the
next knot spawns a branch with one step fewer.  The best explained sum of
squares over all branches (including stopping early) is kept.
"""

from __future__ import annotations

import math
import multiprocessing as mp
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .critical import _k2_grid, zone_candidates
from .functions import Interval, TargetFunction
from .linear import FitResult, Partition, fit_fixed_knots


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    precision: float = 1e-3
    tolerance: float = 1e-3
    epsilon: float = 1e-12
    max_steps: int = 3
    workers: int = 1
    lipschitz: Optional[float] = None
    split_zones: bool = False

    def validate(self, interval: Optional[Interval] = None) -> "SolverConfig":
        if not self.precision > 0:
            raise ConfigError("precision must be positive")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if not self.epsilon >= 0:
            raise ConfigError("epsilon must be nonnegative")
        if not self.tolerance > self.epsilon:
            raise ConfigError("tolerance must exceed epsilon")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ConfigError("max_steps must be a positive integer")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise ConfigError("Lipschitz constant must be positive")
        if interval is not None and not self.precision < interval.length:
            raise ConfigError("precision must be smaller than the interval length")
        return self


def _node(fn, k0, k1, m01, f1, m1b, upper, steps, cfg, materialize):
    """Best (ess, tail) for knots k0 < k1 < ... < upper using at most ``steps`` knots from k1 on.

    ``m01 = fbar(k0, k1)``, ``f1 = f(k1)`` and ``m1b = fbar(k1, upper)`` come
    from the caller, which has them from its own scan.  Runs under an
    ``np.errstate`` set by the public entry points.
    """
    best = (upper - k1) * m1b * m1b
    tail = [k1] if materialize else None
    if steps > 1:
        k2 = _k2_grid(k1, upper, cfg.precision)
        if cfg.lipschitz is not None:
            gap = abs(2.0 * f1 - m01 - f1)
            if math.isfinite(gap):
                k2 = k2[k2 >= k1 + gap / cfg.lipschitz]
        if len(k2):
            m12 = fn.raw_integral(k1, k2) / (k2 - k1)
            c = np.abs(m01 + m12 - 2.0 * f1)
            c[~np.isfinite(c)] = np.inf
            hits = [j for _, _, j in zone_candidates(c, cfg.tolerance, cfg.epsilon, cfg.split_zones)]
            if hits:
                kc = k2[hits]
                fc = fn.raw_eval(kc)
                mc = fn.raw_integral(kc, upper) / (upper - kc)
                for t, j in enumerate(hits):
                    ess, sub = _node(fn, k1, kc[t], m12[j], fc[t], mc[t], upper, steps - 1, cfg, materialize)
                    if ess > best:
                        best = ess
                        if materialize:
                            tail = [k1] + sub
    return best + (k1 - k0) * m01 * m01, tail


def _search(fn, k0, k1, upper, steps, cfg, materialize):
    k0, k1, upper = np.float64(k0), np.float64(k1), np.float64(upper)
    m01 = fn.raw_integral(k0, k1) / (k1 - k0)
    m1b = fn.raw_integral(k1, upper) / (upper - k1)
    ess, tail = _node(fn, k0, k1, m01, fn.raw_eval(k1), m1b, upper, steps, cfg, materialize)
    return float(ess), (None if tail is None else [float(k) for k in tail])


def build_ess(fn: TargetFunction, k0: float, k1: float, upper: float, steps_remaining: int, cfg: SolverConfig) -> float:
    if steps_remaining < 1:
        raise ValueError("steps_remaining must be >= 1")
    if not k0 < k1 < upper:
        raise ValueError("need k0 < k1 < upper")
    with np.errstate(all="ignore"):
        return _search(fn, k0, k1, upper, steps_remaining, cfg, False)[0]


def get_tail(fn: TargetFunction, k0: float, k1: float, upper: float, steps_remaining: int, cfg: SolverConfig):
    """Knots ``(k1, ..., )`` of the best tail from ``k1`` and its ESS contribution."""
    if steps_remaining < 1:
        raise ValueError("steps_remaining must be >= 1")
    if not k0 < k1 < upper:
        raise ValueError("need k0 < k1 < upper")
    with np.errstate(all="ignore"):
        ess, tail = _search(fn, k0, k1, upper, steps_remaining, cfg, True)
    return tail, ess


def sweep_count(interval: Interval, precision: float) -> int:
    """Number of first-knot candidates ``a + i * precision < b`` with i >= 1."""
    a, b = interval.a, interval.b
    i = int(math.floor((b - a) / precision)) + 2
    while a + i * precision >= b:
        i -= 1
    return i


def _sweep(fn, interval, cfg, lo, hi):
    """Best (ess, index) over grid indices lo <= i < hi; index None if nothing beats 0."""
    a, b = interval.a, interval.b
    best, arg = 0.0, None
    with np.errstate(all="ignore"):
        for i in range(lo, hi):
            ess = _search(fn, a, a + i * cfg.precision, b, cfg.max_steps, cfg, False)[0]
            if ess > best:
                best, arg = ess, i
    return best, arg


def _finish(fn, interval, cfg, best_index) -> FitResult:
    if best_index is None:
        best_index = 1
    k1 = interval.a + best_index * cfg.precision
    with np.errstate(all="ignore"):
        _, tail = _search(fn, interval.a, k1, interval.b, cfg.max_steps, cfg, True)
    return fit_fixed_knots(fn, Partition(interval, tuple(tail)))


def escalier_fit(fn: TargetFunction, interval: Interval = Interval(0.0, 2.0), cfg: SolverConfig = SolverConfig()) -> FitResult:
    """Serial sweep search; returns the fit of the best knots found (ascending)."""
    cfg.validate(interval)
    n = sweep_count(interval, cfg.precision)
    search_ess, arg = _sweep(fn, interval, cfg, 1, n + 1)
    return _finish(fn, interval, cfg, arg)


_WORKER_STATE = {}


def _init_worker(fn, interval, cfg):
    _WORKER_STATE["args"] = (fn, interval, cfg)


def _sweep_chunk(bounds):
    fn, interval, cfg = _WORKER_STATE["args"]
    return _sweep(fn, interval, cfg, *bounds)


def _chunks(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    size, extra = divmod(hi - lo, parts)
    out, start = [], lo
    for p in range(parts):
        stop = start + size + (1 if p < extra else 0)
        if stop > start:
            out.append((start, stop))
        start = stop
    return out


def run_chunked(worker_init, init_args, task, chunks, workers):
    """Map ``task`` over ``chunks`` on a forked pool, preserving chunk order.

    Inputs travel through fork inheritance, so closures and other unpicklable
    targets work as long as results are picklable.
    """
    if workers == 1 or len(chunks) <= 1:
        worker_init(*init_args)
        return [task(c) for c in chunks]
    ctx = mp.get_context("fork")
    with ctx.Pool(min(workers, len(chunks)), initializer=worker_init, initargs=init_args) as pool:
        return pool.map(task, chunks, chunksize=1)


def escalier_fit_parallel(fn: TargetFunction, interval: Interval = Interval(0.0, 2.0), cfg: SolverConfig = SolverConfig()) -> FitResult:
    """Same result as :func:`escalier_fit`, with the first-knot grid split across processes.

    Chunks are contiguous and reduced in grid order with a strict comparison,
    so ties go to the smallest first knot whatever the worker count.
    """
    cfg.validate(interval)
    n = sweep_count(interval, cfg.precision)
    chunks = _chunks(1, n + 1, cfg.workers * 4 if cfg.workers > 1 else 1)
    results = run_chunked(_init_worker, (fn, interval, cfg), _sweep_chunk, chunks, cfg.workers)
    best, arg = 0.0, None
    for ess, idx in results:
        if idx is not None and ess > best:
            best, arg = ess, idx
    return _finish(fn, interval, cfg, arg)
