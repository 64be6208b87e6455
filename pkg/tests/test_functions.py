import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from escalier import Interval, mean_value, quadrature_mean, random_step_function, zoo_lookup
from escalier.functions import (
    ZOO_IDS,
    DegenerateIntervalError,
    PrefixIntegral,
    QuadratureError,
    StepTarget,
    UnknownFunctionError,
    from_callable,
)


def simpson(func, lo, hi, n):
    # composite Simpson with n (even) panels, evaluated in blocks
    h = (hi - lo) / n
    total = func(np.array([lo]))[0] + func(np.array([hi]))[0]
    block = 1_000_000
    for start in range(1, n, block):
        i = np.arange(start, min(start + block, n))
        w = np.where(i % 2 == 1, 4.0, 2.0)
        total += np.sum(w * func(lo + i * h))
    return total * h / 3.0


def test_zoo_examples():
    assert zoo_lookup("f1").mean_value(0, 2) == pytest.approx(4 / 3, rel=1e-15)
    assert zoo_lookup("f4").mean_value(0, 2) == 0.5
    assert zoo_lookup("f2").l2_norm_sq(0, 2) == math.inf
    assert set(ZOO_IDS) == {f"f{i}" for i in range(1, 9)}


def test_unknown_id():
    with pytest.raises(UnknownFunctionError):
        zoo_lookup("f9")


def test_mean_value_examples():
    assert mean_value(zoo_lookup("f1"), 1, 2) == pytest.approx(7 / 3, rel=1e-15)
    assert mean_value(zoo_lookup("f5"), 0, 2) == pytest.approx(0.0, abs=1e-15)
    const = StepTarget("c", [1.0], [3.5, 3.5])
    assert mean_value(const, 0.3, 1.7) == pytest.approx(3.5, rel=1e-15)


def test_mean_value_degenerate():
    with pytest.raises(DegenerateIntervalError):
        mean_value(zoo_lookup("f1"), 1.0, 1.0)
    with pytest.raises(DegenerateIntervalError):
        zoo_lookup("f1").mean_value(1.5, 1.0)


def test_singular_improper_means():
    # two half-integrals of 1/sqrt|1-x| over [0,2], each equal to 2
    assert zoo_lookup("f2").mean_value(0, 2) == pytest.approx(2.0, rel=1e-15)
    # integral of log over [0, 1] is -1
    assert zoo_lookup("f3").mean_value(0, 1) == pytest.approx(-1.0, rel=1e-15)
    assert zoo_lookup("f5").l2_norm_sq(0, 2) == pytest.approx(6.0, rel=1e-14)


def test_eval_at_singularity_is_nonfinite():
    assert not math.isfinite(zoo_lookup("f2").eval(1.0))
    assert not math.isfinite(zoo_lookup("f3").eval(0.0))


@pytest.mark.parametrize("fid", ["f1", "f3", "f6", "f7", "f8"])
def test_tss_against_quadrature(fid):
    fn = zoo_lookup(fid)
    pts = [1.0] if fid == "f8" else None
    ref, _ = integrate.quad(lambda x: fn.eval(x) ** 2, 0, 2, points=pts, limit=500, epsabs=1e-13)
    assert fn.l2_norm_sq(0, 2) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("fid", ["f1", "f6", "f7", "f8"])
def test_antiderivative_matches_simpson(fid):
    fn = zoo_lookup(fid)
    lo, hi = (0.2, 0.9) if fid == "f8" else (0.0, 2.0)
    ref = simpson(fn.raw_eval, lo, hi, 200_000)
    assert fn.mean_value(lo, hi) == pytest.approx(ref / (hi - lo), abs=1e-10)


_SING = {"f2": 1.0, "f3": 0.0, "f5": 1.0}


@pytest.mark.parametrize("fid", ZOO_IDS)
def test_mean_value_additivity(fid):
    fn = zoo_lookup(fid)
    rng = np.random.default_rng(ZOO_IDS.index(fid))
    trip = np.sort(rng.uniform(0, 2, (1000, 3)), axis=1)
    lo, m, hi = trip.T
    keep = (lo < m) & (m < hi)
    if fid in _SING:
        s = _SING[fid]
        keep &= (lo != s) & (m != s) & (hi != s)
    lo, m, hi = lo[keep], m[keep], hi[keep]
    lhs = (hi - lo) * fn.mean_value(lo, hi)
    rhs = (m - lo) * fn.mean_value(lo, m) + (hi - m) * fn.mean_value(m, hi)
    scale = np.maximum(1.0, np.abs(lhs))
    assert np.max(np.abs(lhs - rhs) / scale) < 1e-9


def test_quadrature_mean_examples():
    assert quadrature_mean(lambda x: x, 0, 2, 1e-10) == pytest.approx(1.0, abs=1e-10)
    assert quadrature_mean(math.sin, 0, math.pi, 1e-10) == pytest.approx(2 / math.pi, abs=1e-10)


def test_quadrature_mean_f6_simpson_oracle():
    fn = zoo_lookup("f6")
    got = quadrature_mean(fn.eval, 0.0, 1.0, 1e-10)
    ref = simpson(fn.raw_eval, 0.0, 1.0, 10_000_000)
    assert abs(got - ref) <= 1e-8


@pytest.mark.parametrize("fid", ["f1", "f3", "f6", "f7"])
def test_quadrature_agrees_with_closed_form(fid):
    fn = zoo_lookup(fid)
    rng = np.random.default_rng(3)
    lo_bound = 0.05 if fid == "f3" else 0.0
    for lo, hi in np.sort(rng.uniform(lo_bound, 2, (100, 2)), axis=1):
        if hi - lo < 1e-9:
            continue
        assert quadrature_mean(fn.eval, lo, hi, 1e-12) == pytest.approx(fn.mean_value(lo, hi), abs=1e-8)


def test_quadrature_nonconvergence():
    with pytest.raises(QuadratureError):
        quadrature_mean(lambda x: math.sin(1.0 / x) / x, 1e-9, 1.0, 1e-14)
    with pytest.raises(DegenerateIntervalError):
        quadrature_mean(lambda x: x, 1.0, 1.0)


def test_random_step_function_basics():
    g = random_step_function(42, 1, Interval(0, 2), (-10, 10))
    assert len(g.knots) == 1 and 0 < g.knots[0] < 2
    h = random_step_function(42, 1, Interval(0, 2), (-10, 10))
    assert np.array_equal(g.knots, h.knots) and np.array_equal(g.levels, h.levels)
    assert np.all((-10 <= g.levels) & (g.levels <= 10))
    k = g.knots[0]
    # right-continuous at the jump
    assert g.eval(k) == g.levels[1]
    assert g.eval(np.nextafter(k, 0)) == g.levels[0]
    assert g.levels[0] != g.levels[1]


def test_random_step_two_jumps_hand_integration():
    g = random_step_function(5, 2, Interval(0, 2))
    k1, k2 = g.knots
    h0, h1, h2 = g.levels
    lo, hi = k1 / 2, (k2 + 2) / 2
    hand = h0 * (k1 - lo) + h1 * (k2 - k1) + h2 * (hi - k2)
    assert g.mean_value(lo, hi) * (hi - lo) == pytest.approx(hand, rel=1e-14)


def test_random_step_grid_snapping():
    for seed in range(50):
        g = random_step_function(seed, 3, Interval(0, 2), grid=1e-3)
        for k in g.knots:
            i = round(k / 1e-3)
            assert k == i * 1e-3 and 0 < k < 2


def test_random_step_rejects_bad_args():
    with pytest.raises(ValueError):
        random_step_function(0, 0)
    with pytest.raises(ValueError):
        random_step_function(0, 1, height_range=(1, 1))


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0.01, 1.99), min_size=1, max_size=6, unique=True),
    st.floats(0.0, 1.0), st.floats(1.0, 2.0),
)
def test_step_target_integral_matches_l2(knots, lo, hi):
    knots = sorted(knots)
    levels = np.arange(len(knots) + 1, dtype=float) - 2.0
    g = StepTarget("s", knots, levels)
    if hi - lo < 1e-6:
        return
    xs = np.linspace(lo, hi, 20001)
    ref = integrate.trapezoid(g.raw_eval(xs) ** 2, xs)
    assert g.l2_norm_sq(lo, hi) == pytest.approx(ref, abs=5e-3)


def test_prefix_integral_and_from_callable():
    iv = Interval(0.0, 2.0)
    P = PrefixIntegral(lambda x: np.exp(np.sin(3 * x)), iv)
    xs = np.linspace(0, 2, 17)
    for x in xs:
        ref, _ = integrate.quad(lambda t: math.exp(math.sin(3 * t)), 0, x, epsabs=1e-13)
        assert P(x) == pytest.approx(ref, abs=1e-10)
    fn = from_callable("expsin", lambda x: np.exp(np.sin(3 * x)), iv)
    assert fn.mean_value(0.3, 1.1) == pytest.approx(quadrature_mean(fn.eval, 0.3, 1.1), abs=1e-10)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    with pytest.raises(ValueError):
        Interval(0.0, math.inf)
    assert Interval(0, 2).length == 2
