"""Fixed-knot least squares for step functions.

With the knots held fixed, the optimal height on each segment is the mean of
the target there and the explained sum of squares is the length-weighted sum
of squared segment means.  The Gram-matrix routines below are kept for
cross-checking that closed form; the fit path never builds a matrix.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .functions import Interval, TargetFunction


@dataclass(frozen=True)
class Partition:
    interval: Interval
    knots: tuple[float, ...] = ()

    def __post_init__(self):
        knots = tuple(float(k) for k in self.knots)
        object.__setattr__(self, "knots", knots)
        edges = (self.interval.a,) + knots + (self.interval.b,)
        if any(not lo < hi for lo, hi in zip(edges[:-1], edges[1:])):
            raise ValueError(f"knots must be strictly increasing inside ({self.interval.a}, {self.interval.b}): {knots}")

    @property
    def n(self) -> int:
        return len(self.knots)

    @property
    def edges(self) -> np.ndarray:
        """``a, k1, ..., kn, b`` as an array."""
        return np.array((self.interval.a,) + self.knots + (self.interval.b,))


@dataclass(frozen=True)
class FitResult:
    """Optimal step heights for a partition plus the sum-of-squares bundle.

    ``tss`` is ``math.inf`` for non-square-integrable targets, in which case
    ``sse`` and ``r2`` are ``None`` (undefined).
    """

    partition: Partition
    coefficients: tuple[float, ...]
    ess: float
    tss: float
    sse: Optional[float]
    r2: Optional[float]
    function: str = ""
    segment_means: tuple[float, ...] = field(default=(), repr=False)

    @property
    def knots(self) -> tuple[float, ...]:
        return self.partition.knots

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "a": self.partition.interval.a,
            "b": self.partition.interval.b,
            "knots": list(self.knots),
            "coefficients": list(self.coefficients),
            "ess": self.ess,
            "tss": encode_real(self.tss),
            "sse": encode_real(self.sse),
            "r2": encode_real(self.r2),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        part = Partition(Interval(float(d["a"]), float(d["b"])), tuple(d["knots"]))
        coeffs = tuple(float(c) for c in d["coefficients"])
        return cls(
            partition=part,
            coefficients=coeffs,
            ess=float(d["ess"]),
            tss=decode_real(d["tss"]),
            sse=decode_real(d["sse"]),
            r2=decode_real(d["r2"]),
            function=d.get("function", ""),
            segment_means=tuple(np.cumsum(coeffs)),
        )


def encode_real(x):
    """JSON-safe real: ``"inf"`` for infinities, ``"undefined"`` for None/NaN."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "undefined"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def decode_real(x):
    if x == "undefined" or x is None:
        return None
    if x in ("inf", "-inf"):
        return math.inf if x == "inf" else -math.inf
    return float(x)


def ess_from_means(edges: Sequence[float], means: Sequence[float]) -> float:
    """Length-weighted sum of squared means, accumulated left to right."""
    total = 0.0
    for lo, hi, m in zip(edges[:-1], edges[1:], means):
        total += (hi - lo) * m * m
    return total


def fit_fixed_knots(fn: TargetFunction, p: Partition) -> FitResult:
    edges = p.edges
    means = [float(m) for m in np.atleast_1d(fn.mean_value(edges[:-1], edges[1:]))]
    coeffs = (means[0],) + tuple(means[i] - means[i - 1] for i in range(1, len(means)))
    ess = ess_from_means(edges.tolist(), means)
    tss = fn.l2_norm_sq(p.interval.a, p.interval.b)
    if math.isfinite(tss):
        sse = tss - ess
        r2 = ess / tss if tss > 0 else None
    else:
        sse = r2 = None
    return FitResult(p, coeffs, ess, tss, sse, r2, function=fn.id, segment_means=tuple(means))


def evaluate_escalier(fit: FitResult, x):
    """Value of the fitted step function; right-continuous at the knots."""
    xs = np.asarray(x, dtype=float)
    a, b = fit.partition.interval.a, fit.partition.interval.b
    if np.any((xs < a) | (xs > b)):
        raise ValueError(f"abscissa outside [{a}, {b}]")
    heights = np.asarray(fit.segment_means or np.cumsum(fit.coefficients))
    y = heights[np.searchsorted(np.asarray(fit.knots), xs, side="right")]
    return float(y) if y.ndim == 0 else y


@dataclass(frozen=True)
class SinglePairGram:
    """Gram matrix of the unit steps ``u_a, u_k1, ..., u_kn`` and its inverse.

    ``dense[i, j] = b - k_max(i, j)``; the inverse is tridiagonal and stored
    by its main diagonal and (symmetric) first off-diagonal.
    """

    dense: np.ndarray
    inv_diag: np.ndarray
    inv_off: np.ndarray

    @property
    def order(self) -> int:
        return len(self.inv_diag)

    def inverse(self) -> np.ndarray:
        m = np.diag(self.inv_diag)
        if len(self.inv_off):
            m += np.diag(self.inv_off, 1) + np.diag(self.inv_off, -1)
        return m


def gram_build(p: Partition) -> SinglePairGram:
    k = np.array((p.interval.a,) + p.knots)
    b = p.interval.b
    n = p.n
    dense = b - k[np.maximum.outer(np.arange(n + 1), np.arange(n + 1))]
    gaps = np.diff(np.append(k, b))  # k_{i+1} - k_i, i = 0..n
    inv_diag = 1.0 / gaps
    inv_diag[1:] += 1.0 / gaps[:-1]
    inv_off = -1.0 / gaps[:-1]
    return SinglePairGram(dense, inv_diag, inv_off)


def ess_quadratic_form(fn: TargetFunction, p: Partition) -> float:
    """ESS as ``f^T G^{-1} f`` with ``f_i = <f, u_{k_i}>``.  Cross-check only."""
    g = gram_build(p)
    k = np.array((p.interval.a,) + p.knots)
    fvec = np.atleast_1d(fn.integral(k, np.full_like(k, p.interval.b)))
    return float(g.inv_diag @ (fvec * fvec) + 2.0 * (g.inv_off @ (fvec[:-1] * fvec[1:])))
