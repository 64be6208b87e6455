"""Exhaustive baseline: every ascending knot tuple on the grid ``a + i * precision``.

Segment integrals come from one pass of prefix integrals over the grid, so
each tuple costs O(1) amortised.  The enumeration itself is compiled with
numba; the order is lexicographic and ties keep the first tuple seen.
"""

from __future__ import annotations

import math
import os
from typing import Optional

import numba
import numpy as np

from .functions import Interval, TargetFunction
from .linear import FitResult, Partition, fit_fixed_knots
from .solver import _chunks, run_chunked

DEFAULT_BUDGET = 10**10


class BudgetExceeded(RuntimeError):
    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"brute force needs {count} evaluations, budget is {budget}")


def default_budget() -> int:
    env = os.environ.get("ESCALIER_BUDGET")
    return int(float(env)) if env else DEFAULT_BUDGET


def brute_grid(interval: Interval, precision: float) -> np.ndarray:
    """Interior grid points ``a + i * precision``, i >= 1, strictly below b."""
    a, b = interval.a, interval.b
    count = int(math.floor((b - a) / precision)) + 2
    x = a + np.arange(1, count + 1) * precision
    return x[x < b]


@numba.njit(cache=True)
def _enumerate(x, P, a, b, total, n, first_lo, first_hi):
    """Scan all ascending n-tuples whose first index lies in [first_lo, first_hi).

    Returns (best_ess, best_indices, count).  ``P[i]`` is the integral over [a, x[i]].
    """
    m = len(x)
    left = np.empty(m)
    right = np.empty(m)
    for i in range(m):
        ml = P[i] / (x[i] - a)
        left[i] = (x[i] - a) * ml * ml
        mr = (total - P[i]) / (b - x[i])
        right[i] = (b - x[i]) * mr * mr
    best = -np.inf
    best_idx = np.full(n, -1, np.int64)
    count = 0
    hi = min(first_hi, m - n + 1)
    if first_lo >= hi:
        return best, best_idx, count
    if n == 1:
        for i in range(first_lo, hi):
            v = left[i] + right[i]
            count += 1
            if v > best:
                best = v
                best_idx[0] = i
        return best, best_idx, count

    idx = np.empty(n, np.int64)
    partial = np.empty(n)
    idx[0] = first_lo
    partial[0] = left[first_lo]
    for d in range(1, n - 1):
        idx[d] = idx[d - 1] + 1
        w = x[idx[d]] - x[idx[d - 1]]
        mm = (P[idx[d]] - P[idx[d - 1]]) / w
        partial[d] = partial[d - 1] + w * mm * mm
    while True:
        j = idx[n - 2]
        base = partial[n - 2]
        xj = x[j]
        pj = P[j]
        for l in range(j + 1, m):
            w = x[l] - xj
            mm = (P[l] - pj) / w
            v = base + w * mm * mm + right[l]
            count += 1
            if v > best:
                best = v
                for t in range(n - 1):
                    best_idx[t] = idx[t]
                best_idx[n - 1] = l
        # advance the odometer over the first n - 1 indices
        d = n - 2
        while d >= 0:
            idx[d] += 1
            limit = hi - 1 if d == 0 else m - n + d
            if idx[d] <= limit:
                break
            d -= 1
        if d < 0:
            break
        if d == 0:
            partial[0] = left[idx[0]]
        else:
            w = x[idx[d]] - x[idx[d - 1]]
            mm = (P[idx[d]] - P[idx[d - 1]]) / w
            partial[d] = partial[d - 1] + w * mm * mm
        for e in range(d + 1, n - 1):
            idx[e] = idx[e - 1] + 1
            w = x[idx[e]] - x[idx[e - 1]]
            mm = (P[idx[e]] - P[idx[e - 1]]) / w
            partial[e] = partial[e - 1] + w * mm * mm
    return best, best_idx, count


def _prefix(fn: TargetFunction, interval: Interval, x: np.ndarray):
    a, b = interval.a, interval.b
    P = (x - a) * np.asarray(fn.fbar(np.full_like(x, a), x), dtype=float)
    total = (b - a) * float(fn.fbar(a, b))
    return P, total


def _check(interval, n, precision, budget):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not precision > 0:
        raise ValueError("precision must be positive")
    x = brute_grid(interval, precision)
    if len(x) < n:
        raise ValueError(f"grid has {len(x)} interior points, fewer than n={n}")
    count = math.comb(len(x), n)
    budget = default_budget() if budget is None else budget
    if count > budget:
        raise BudgetExceeded(count, budget)
    return x, count


def _to_fit(fn, interval, x, best_idx) -> FitResult:
    return fit_fixed_knots(fn, Partition(interval, tuple(float(x[i]) for i in best_idx)))


def enumeration_count(fn: TargetFunction, interval: Interval, n: int, precision: float) -> int:
    """Number of tuples the kernel actually visits (for checking against C(m, n))."""
    x = brute_grid(interval, precision)
    P, total = _prefix(fn, interval, x)
    return int(_enumerate(x, P, interval.a, interval.b, total, n, 0, len(x))[2])


def brute_force_fit(
    fn: TargetFunction,
    interval: Interval = Interval(0.0, 2.0),
    n: int = 2,
    precision: float = 1e-2,
    budget: Optional[int] = None,
) -> FitResult:
    """Best n-knot fit over all grid tuples; ``BudgetExceeded`` when C(m, n) > budget.

    ``budget`` defaults to ``ESCALIER_BUDGET`` from the environment, else 1e10.
    """
    x, _ = _check(interval, n, precision, budget)
    P, total = _prefix(fn, interval, x)
    best, best_idx, _ = _enumerate(x, P, interval.a, interval.b, total, n, 0, len(x))
    return _to_fit(fn, interval, x, best_idx)


_STATE = {}


def _init(x, P, a, b, total, n):
    _STATE["args"] = (x, P, a, b, total, n)


def _chunk_task(bounds):
    x, P, a, b, total, n = _STATE["args"]
    best, idx, _ = _enumerate(x, P, a, b, total, n, bounds[0], bounds[1])
    return best, idx.copy()


def brute_force_fit_parallel(
    fn: TargetFunction,
    interval: Interval = Interval(0.0, 2.0),
    n: int = 2,
    precision: float = 1e-2,
    workers: int = 2,
    budget: Optional[int] = None,
) -> FitResult:
    """Parallel over first-knot index; reduced in index order, same answer as serial."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    x, _ = _check(interval, n, precision, budget)
    P, total = _prefix(fn, interval, x)
    # compile before forking so children inherit the machine code
    _enumerate(x[:n + 1], P[:n + 1], interval.a, interval.b, total, n, 0, 1)
    n_first = len(x) - n + 1
    parts = 1 if workers == 1 else min(n_first, workers * 8)
    chunks = _chunks(0, n_first, parts)
    results = run_chunked(_init, (x, P, interval.a, interval.b, total, n), _chunk_task, chunks, workers)
    best, best_idx = -np.inf, None
    for value, idx in results:
        if idx[0] >= 0 and value > best:
            best, best_idx = value, idx
    return _to_fit(fn, interval, x, best_idx)
