"""First-order conditions for free knots and the critical-zone sweep.

A knot ``k1`` preceded by ``k0`` is critical for a following knot ``k2`` when
the average of the two adjacent segment means equals ``f(k1)``.  The sweep
evaluates the residual ("criticality") on a grid of ``k2`` values and groups
consecutive sub-tolerance points into zones, one candidate per zone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .functions import TargetFunction
from .linear import Partition


@dataclass(frozen=True)
class CriticalZone:
    zone_start: float
    zone_end: float
    argmin_k2: float
    min_criticality: float


def _check_order(*ks):
    if any(not lo < hi for lo, hi in zip(ks[:-1], ks[1:])):
        raise ValueError(f"abscissae must be strictly increasing, got {ks}")


def _as_inf(c):
    return np.where(np.isfinite(c), c, np.inf)


def criticality(fn: TargetFunction, k0: float, k1: float, k2: float) -> float:
    _check_order(k0, k1, k2)
    c = abs(fn.fbar(k0, k1) + fn.fbar(k1, k2) - 2.0 * fn.eval(k1))
    return c if math.isfinite(c) else math.inf


def criticality_row(fn: TargetFunction, k0: float, k1: float, k2: np.ndarray) -> np.ndarray:
    """Criticality over an array of ``k2`` values; non-finite becomes +inf."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return _as_inf(np.abs(fn.fbar(k0, k1) + fn.fbar(k1, k2) - 2.0 * fn.eval(k1)))


def _k2_grid(k1: float, upper: float, precision: float) -> np.ndarray:
    # same arithmetic as the scalar loop k2 = k1 + i * precision, i = 1, 2, ...
    count = int(math.floor((upper - k1) / precision)) + 2
    k2 = k1 + np.arange(1, count + 1) * precision
    return k2[k2 < upper]


def lipschitz_skip(K: float, fn: TargetFunction, k0: float, k1: float) -> float:
    """Lower bound on the next critical knot for a K-Lipschitz target.

    Critical ``k2`` needs ``fbar(k1, k2) - f(k1) = f(k1) - fbar(k0, k1)`` and
    ``|fbar(k1, k2) - f(k1)| <= K (k2 - k1)``, so ``k2 >= k1 + |f(k1) - fbar(k0, k1)| / K``.
    """
    if not K > 0:
        raise ValueError("Lipschitz constant must be positive")
    _check_order(k0, k1)
    gap = abs(2.0 * fn.eval(k1) - fn.fbar(k0, k1) - fn.eval(k1))
    return k1 + gap / K if math.isfinite(gap) else k1


@numba.njit(cache=True)
def _zone_kernel(c, tolerance, epsilon, split):
    """Flat (start, stop, argmin) triples of critical zones, stop exclusive.

    A zone opens at a point with ``epsilon < c < tolerance`` and extends over
    the following points while ``c < tolerance``.  Leading points of a
    sub-tolerance run that are degenerate (``c <= epsilon``) do not open it.
    Within a zone, degenerate points are never candidates; ties keep the first.
    """
    m = len(c)
    out = np.empty(3 * m, np.int64)
    n = 0
    i = 0
    while i < m:
        if not c[i] < tolerance:
            i += 1
            continue
        e = i
        while e < m and c[e] < tolerance:
            e += 1
        s = i
        while s < e and not c[s] > epsilon:
            s += 1
        i = e
        if s == e:
            continue
        found = False
        if split and e - s > 2:
            for j in range(s, e):
                v = c[j]
                if not v > epsilon:
                    continue
                lft = c[j - 1] if j > s and c[j - 1] > epsilon else np.inf
                rgt = c[j + 1] if j + 1 < e and c[j + 1] > epsilon else np.inf
                if v < lft and v < rgt:
                    out[n], out[n + 1], out[n + 2] = s, e, j
                    n += 3
                    found = True
        if not found:
            best, arg = np.inf, s
            for j in range(s, e):
                if c[j] > epsilon and c[j] < best:
                    best, arg = c[j], j
            out[n], out[n + 1], out[n + 2] = s, e, arg
            n += 3
    return out[:n]


def scan_critical_zones(fn: TargetFunction, k0: float, k1: float, upper: float, cfg) -> list[CriticalZone]:
    """Sweep ``k2 = k1 + i * precision < upper`` and return critical zones in order.

    ``cfg`` needs ``precision``, ``tolerance`` and ``epsilon``; optional
    ``lipschitz`` (skip bound) and ``split_zones`` (one candidate per strict
    local minimum instead of one per zone).
    """
    _check_order(k0, k1, upper)
    k2 = _k2_grid(k1, upper, cfg.precision)
    K = getattr(cfg, "lipschitz", None)
    if K is not None:
        k2 = k2[k2 >= lipschitz_skip(K, fn, k0, k1)]
    if len(k2) == 0:
        return []
    c = criticality_row(fn, k0, k1, k2)
    zones = []
    for s, e, j in zone_candidates(c, cfg.tolerance, cfg.epsilon, getattr(cfg, "split_zones", False)):
        zones.append(CriticalZone(float(k2[s]), float(k2[e - 1]), float(k2[j]), float(c[j])))
    return zones


def zone_candidates(c: np.ndarray, tolerance: float, epsilon: float, split: bool = False):
    """(start, stop, argmin) index triples over a criticality row, in order."""
    flat = _zone_kernel(np.ascontiguousarray(c, dtype=np.float64), float(tolerance), float(epsilon), bool(split))
    return [tuple(t) for t in flat.reshape(-1, 3).tolist()]


def terminal_residual(fn: TargetFunction, k_prev: float, k_last: float, b: float) -> float:
    _check_order(k_prev, k_last, b)
    return abs(fn.fbar(k_prev, k_last) + fn.fbar(k_last, b) - 2.0 * fn.eval(k_last))


def three_term_residuals(fn: TargetFunction, p: Partition) -> np.ndarray:
    """Signed residuals ``fbar(k_i, k_i+1) + fbar(k_i-1, k_i) - 2 f(k_i)``, i = 1..n."""
    e = p.edges
    m = np.atleast_1d(fn.fbar(e[:-1], e[1:]))
    return m[1:] + m[:-1] - 2.0 * np.atleast_1d(fn.eval(e[1:-1]))


def full_recurrence_residuals(fn: TargetFunction, p: Partition) -> list[float]:
    """Residuals of the unrolled recurrence for each knot (last one is terminal).

    Residual ``i`` compares ``fbar(k_i, k_i+1)`` with
    ``2 sum_{j<=i} (-1)^(i-j) f(k_j) + (-1)^i fbar(a, k1)``.
    """
    if p.n < 1:
        raise ValueError("need at least one knot")
    e = p.edges
    means = np.atleast_1d(fn.fbar(e[:-1], e[1:]))
    fk = np.atleast_1d(fn.eval(e[1:-1]))
    out = []
    alt = 0.0  # sum_{j<=i} (-1)^(i-j) f(k_j)
    for i in range(1, p.n + 1):
        alt = fk[i - 1] - alt
        sign = -1.0 if i % 2 else 1.0
        out.append(float(abs(means[i] - (2.0 * alt + sign * means[0]))))
    return out
