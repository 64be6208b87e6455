"""Target functions: point evaluation plus exact mean values over subintervals.

Everything downstream is built on two primitives, ``f(x)`` and the mean value
``fbar(lo, hi) = integral(f, lo, hi) / (hi - lo)``.  Zoo functions carry a
closed-form antiderivative so that improper integrals at singular points are
exact and the sweep search can call the mean value millions of times cheaply.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

ArrayFunc = Callable[[np.ndarray], np.ndarray]


class DegenerateIntervalError(ValueError):
    """Raised when a mean value is requested over an interval with hi <= lo."""


class UnknownFunctionError(KeyError):
    pass


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise ValueError(f"interval requires finite a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a


class TargetFunction:
    """A function on a finite interval with exact subinterval integrals.

    Parameters
    ----------
    id : str
        Short identifier, e.g. ``"f1"``.
    func : callable
        Vectorised point evaluation.  May return inf/nan at ``singularities``.
    antiderivative : callable, optional
        Vectorised primitive ``F`` with ``integral(lo, hi) = F(hi) - F(lo)``.
    integral : callable, optional
        Direct vectorised ``integral(lo, hi)``; overrides ``antiderivative``.
        Used by step functions, where it avoids cancellation in ``F(hi) - F(lo)``.
    sq_antiderivative : callable, optional
        Primitive of ``f**2``.  When absent, ``l2_norm_sq`` falls back to quadrature.
    square_integrable : bool
        False marks functions whose squared norm diverges on intervals
        containing a singularity.
    """

    def __init__(
        self,
        id: str,
        func: ArrayFunc,
        antiderivative: Optional[ArrayFunc] = None,
        *,
        integral: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
        sq_antiderivative: Optional[ArrayFunc] = None,
        square_integrable: bool = True,
        singularities: Sequence[float] = (),
        lipschitz_bound: Optional[float] = None,
        description: str = "",
    ):
        if antiderivative is None and integral is None:
            raise ValueError("need an antiderivative or an integral routine")
        self.id = id
        self._func = func
        self._F = antiderivative
        self._integral = integral
        self._G = sq_antiderivative
        self.square_integrable = square_integrable
        self.singularities = tuple(float(s) for s in singularities)
        self.lipschitz_bound = lipschitz_bound
        self.description = description

    def __repr__(self):
        return f"TargetFunction({self.id!r})"

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            y = self._func(np.asarray(x, dtype=float))
        return float(y) if np.ndim(y) == 0 else y

    def raw_eval(self, x: np.ndarray) -> np.ndarray:
        """Array-in, array-out evaluation without error-state handling."""
        return self._func(x)

    def raw_integral(self, lo, hi):
        """Array integral without conversions; callers manage ``np.errstate``."""
        if self._integral is not None:
            return self._integral(lo, hi)
        return self._F(hi) - self._F(lo)

    def integral(self, lo, hi):
        """Integral of f over [lo, hi], vectorised, no ordering checks."""
        with np.errstate(divide="ignore", invalid="ignore"):
            if self._integral is not None:
                r = self._integral(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
            else:
                r = self._F(np.asarray(hi, dtype=float)) - self._F(np.asarray(lo, dtype=float))
        return float(r) if np.ndim(r) == 0 else r

    def fbar(self, lo, hi):
        """Unchecked mean value; the hot path of the sweep search."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.integral(lo, hi) / (np.asarray(hi, dtype=float) - lo)

    def mean_value(self, lo, hi):
        lo_a, hi_a = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        if np.any(~(hi_a > lo_a)):
            raise DegenerateIntervalError(f"mean value needs lo < hi, got ({lo}, {hi})")
        r = self.fbar(lo_a, hi_a)
        return float(r) if np.ndim(r) == 0 else r

    def l2_norm_sq(self, lo: float, hi: float) -> float:
        """Integral of f**2 over [lo, hi]; ``math.inf`` when it diverges."""
        if not hi > lo:
            raise DegenerateIntervalError(f"need lo < hi, got ({lo}, {hi})")
        if not self.square_integrable and any(lo <= s <= hi for s in self.singularities):
            return math.inf
        if self._G is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                return float(self._G(np.float64(hi)) - self._G(np.float64(lo)))
        pts = [s for s in self.singularities if lo < s < hi]
        val, _ = integrate.quad(
            lambda t: self.eval(t) ** 2, lo, hi, points=pts or None,
            limit=1000, epsabs=1e-14, epsrel=1e-13,
        )
        return float(val)


# ---------------------------------------------------------------------------
# closed forms used by the zoo

def _xlogx(x):
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, x * np.log(safe), 0.0)


def _f3_F(x):
    return _xlogx(x) - x


def _f3_G(x):
    # d/dx [x ln^2 x - 2 x ln x + 2x] = ln^2 x
    safe = np.where(x > 0, x, 1.0)
    lg = np.log(safe)
    return np.where(x > 0, x * lg * lg - 2 * x * lg + 2 * x, 0.0)


def _f2(x):
    return 1.0 / np.sqrt(np.abs(1.0 - x))


def _f2_F(x):
    return 2.0 * np.sign(x - 1.0) * np.sqrt(np.abs(x - 1.0))


def _f2_G(x):
    # primitive of 1/|1-x| on either side of the pole
    return np.sign(x - 1.0) * np.log(np.abs(x - 1.0))


def _f5(x):
    return 1.0 / np.cbrt(x - 1.0)


def _f5_F(x):
    return 1.5 * np.abs(x - 1.0) ** (2.0 / 3.0)


def _f5_G(x):
    return 3.0 * np.cbrt(x - 1.0)


_W6 = 10.0 * np.pi


def _f6(x):
    return (11.0 - 10.0 * x) ** 2 * (3.0 + np.cos(10.0 * np.pi * x)) / 32.0 + np.sin(
        (np.pi + 10.0 * np.pi * x) / 4.0
    ) ** 2


def _f6_F(x):
    u = 11.0 - 10.0 * x
    s, c = np.sin(_W6 * x), np.cos(_W6 * x)
    # integration by parts of u^2 cos(w x); sin^2((pi + 10 pi x)/4) = (1 + sin(5 pi x)) / 2
    poly_cos = (u * u * s / _W6 - 20.0 * u * c / _W6**2 - 200.0 * s / _W6**3) / 32.0
    return -(u**3) / 320.0 + poly_cos + x / 2.0 - np.cos(5.0 * np.pi * x) / (10.0 * np.pi)


def _f7(x):
    return x * np.sin(2.25 * x * x)


def _f7_F(x):
    return -np.cos(2.25 * x * x) / 4.5


def _f8(x):
    return np.where(x < 1.0, x, x - 1.0)


def _f8_F(x):
    return np.where(x < 1.0, 0.5 * x * x, 0.5 + 0.5 * (x - 1.0) ** 2)


def _f8_G(x):
    return np.where(x < 1.0, x**3 / 3.0, 1.0 / 3.0 + (x - 1.0) ** 3 / 3.0)


class StepTarget(TargetFunction):
    """Right-continuous step function with exact piecewise integrals.

    ``levels[0]`` holds on ``x < knots[0]``, ``levels[i]`` on ``[knots[i-1], knots[i])``.
    """

    def __init__(self, id, knots, levels, **kw):
        self.knots = np.asarray(knots, dtype=float)
        self.levels = np.asarray(levels, dtype=float)
        if len(self.levels) != len(self.knots) + 1:
            raise ValueError("need exactly one more level than knots")
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("step knots must be strictly increasing")
        super().__init__(id, self._eval, integral=self._piece_integral, **kw)

    def _eval(self, x):
        return self.levels[np.searchsorted(self.knots, x, side="right")]

    def _piece_integral(self, lo, hi):
        lo_b, hi_b = np.broadcast_arrays(lo, hi)
        left = np.concatenate(([-np.inf], self.knots))
        right = np.concatenate((self.knots, [np.inf]))
        overlap = np.minimum(hi_b[..., None], right) - np.maximum(lo_b[..., None], left)
        return (self.levels * np.maximum(overlap, 0.0)).sum(axis=-1)

    def l2_norm_sq(self, lo, hi):
        if not hi > lo:
            raise DegenerateIntervalError(f"need lo < hi, got ({lo}, {hi})")
        left = np.concatenate(([-np.inf], self.knots))
        right = np.concatenate((self.knots, [np.inf]))
        overlap = np.maximum(np.minimum(hi, right) - np.maximum(lo, left), 0.0)
        return float((self.levels**2 * overlap).sum())


def _build_zoo():
    return {
        "f1": TargetFunction(
            "f1", lambda x: x * x, lambda x: x**3 / 3.0,
            sq_antiderivative=lambda x: x**5 / 5.0,
            lipschitz_bound=4.0, description="x^2",
        ),
        "f2": TargetFunction(
            "f2", _f2, _f2_F, sq_antiderivative=_f2_G, square_integrable=False,
            singularities=(1.0,), description="1/sqrt|1-x|",
        ),
        "f3": TargetFunction(
            "f3", np.log, _f3_F, sq_antiderivative=_f3_G,
            singularities=(0.0,), description="log x",
        ),
        "f4": StepTarget("f4", [1.0], [0.0, 1.0], description="unit step at 1"),
        "f5": TargetFunction(
            "f5", _f5, _f5_F, sq_antiderivative=_f5_G,
            singularities=(1.0,), description="1/cbrt(x-1)",
        ),
        # |f6'| <= (880 + 1210 pi)/32 + 5 pi/2 on [0, 2]
        "f6": TargetFunction("f6", _f6, _f6_F, lipschitz_bound=155.0, description="1-D Levy function"),
        # |f7'| = |sin(9x^2/4) + 4.5 x^2 cos(9x^2/4)| <= 1 + 18 on [0, 2]
        "f7": TargetFunction("f7", _f7, _f7_F, lipschitz_bound=19.0, description="x sin(9x^2/4)"),
        "f8": TargetFunction(
            "f8", _f8, _f8_F, sq_antiderivative=_f8_G, description="double ramp with a jump at 1",
        ),
    }


_ZOO = _build_zoo()
ZOO_IDS = tuple(_ZOO)


def zoo_lookup(id: str) -> TargetFunction:
    """Return one of the eight benchmark functions ``"f1"`` ... ``"f8"``.

    Lipschitz bounds, where given, hold on the benchmark interval [0, 2].
    """
    try:
        return _ZOO[id]
    except KeyError:
        raise UnknownFunctionError(f"unknown function id {id!r}; expected one of {', '.join(ZOO_IDS)}") from None


def mean_value(fn: TargetFunction, lo: float, hi: float) -> float:
    return fn.mean_value(lo, hi)


def random_step_function(
    seed: int,
    nsteps: int,
    interval: Interval = Interval(0.0, 2.0),
    height_range: tuple[float, float] = (-10.0, 10.0),
    grid: Optional[float] = None,
) -> StepTarget:
    """Random right-continuous step function with ``nsteps`` jumps in (a, b).

    With ``grid`` set, jump positions are snapped to ``a + i * grid`` using the
    same arithmetic as the sweep search, so an exact fit lies on the sweep grid.
    """
    if nsteps < 1:
        raise ValueError("nsteps must be >= 1")
    lo_h, hi_h = height_range
    if not lo_h < hi_h:
        raise ValueError("height range must be nonempty")
    a, b = interval.a, interval.b
    rng = np.random.default_rng(seed)
    raw = rng.uniform(a, b, size=nsteps)
    if grid is not None:
        n_grid = int(math.floor((b - a) / grid)) + 1
        while a + n_grid * grid >= b:
            n_grid -= 1
        idx = np.clip(np.rint((raw - a) / grid).astype(int), 1, n_grid)
        knots = np.array([a + int(i) * grid for i in np.unique(idx)])
        knots = knots[(knots > a) & (knots < b)]
    else:
        knots = np.unique(raw)
        knots = knots[(knots > a) & (knots < b)]
    levels = rng.uniform(lo_h, hi_h, size=len(knots) + 1)
    return StepTarget(f"random:{seed}:{nsteps}", knots, levels, description="random step function")


def quadrature_mean(func: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    """Mean of ``func`` over [lo, hi] by adaptive Gauss-Kronrod quadrature.

    ``tol`` bounds the absolute error of the integral, not of the mean.
    """
    if not hi > lo:
        raise DegenerateIntervalError(f"need lo < hi, got ({lo}, {hi})")
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(func, lo, hi, epsabs=tol, epsrel=0.0, limit=1000)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature did not converge on ({lo}, {hi}): {exc}") from None
    return val / (hi - lo)


class PrefixIntegral:
    """Cached ``F(x) = integral(f, a, x)`` for functions without a closed form.

    Panel integrals are computed once by adaptive quadrature; a query adds a
    fixed-order Gauss-Legendre rule over the partial panel.
    """

    def __init__(self, func: ArrayFunc, interval: Interval, panels: int = 512, tol: float = 1e-10, order: int = 24):
        self.func = func
        self.nodes = np.linspace(interval.a, interval.b, panels + 1)
        pieces = []
        for lo, hi in zip(self.nodes[:-1], self.nodes[1:]):
            v, _ = integrate.quad(lambda t: float(func(np.float64(t))), lo, hi, epsabs=tol / panels, epsrel=1e-13, limit=200)
            pieces.append(v)
        self.cumulative = np.concatenate(([0.0], np.cumsum(pieces)))
        self._t, self._w = np.polynomial.legendre.leggauss(order)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.clip(np.searchsorted(self.nodes, x, side="right") - 1, 0, len(self.nodes) - 2)
        left = self.nodes[j]
        half = 0.5 * (x - left)
        pts = left[..., None] + half[..., None] * (self._t + 1.0)
        partial = half * (self.func(pts) * self._w).sum(axis=-1)
        return self.cumulative[j] + partial


def from_callable(id: str, func: ArrayFunc, interval: Interval, **kw) -> TargetFunction:
    """Wrap a vectorised callable, building its prefix-integral cache eagerly."""
    return TargetFunction(id, func, PrefixIntegral(func, interval), **kw)
