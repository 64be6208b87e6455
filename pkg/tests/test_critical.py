import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from escalier import (
    Interval,
    Partition,
    SolverConfig,
    TargetFunction,
    criticality,
    full_recurrence_residuals,
    lipschitz_skip,
    scan_critical_zones,
    terminal_residual,
    zoo_lookup,
)
from escalier.critical import criticality_row, three_term_residuals, zone_candidates
from escalier.functions import StepTarget

LIN = TargetFunction("lin", lambda x: x, lambda x: 0.5 * x * x)
CONST = TargetFunction("const", lambda x: np.full_like(x, 1.75), lambda x: 1.75 * x)
P1 = (0.99387, 1.55194)


def dense_root(fn, k0, k1, lo, hi, step=1e-6):
    """Oracle: sign change of the signed residual on a 1e-6 grid."""
    k2 = np.arange(lo, hi, step)
    s = fn.fbar(k0, k1) + fn.fbar(k1, k2) - 2.0 * fn.eval(k1)
    flips = np.flatnonzero(np.sign(s[:-1]) != np.sign(s[1:]))
    return k2[flips]


def test_criticality_examples():
    assert criticality(LIN, 0, 1, 2) == pytest.approx(0.0, abs=1e-15)
    assert criticality(zoo_lookup("f1"), 0, *P1) <= 2e-3
    assert criticality(zoo_lookup("f4"), 0, 1, 2) == 1.0


def test_criticality_ordering_and_nonfinite():
    with pytest.raises(ValueError):
        criticality(LIN, 0, 1, 1)
    with pytest.raises(ValueError):
        criticality(LIN, 1, 0.5, 2)
    assert criticality(zoo_lookup("f2"), 0.5, 1.0, 1.5) == math.inf
    row = criticality_row(zoo_lookup("f2"), 0.5, 1.0, np.array([1.2, 1.4]))
    assert np.all(row == np.inf)


def test_scan_linear_contract():
    cfg = SolverConfig(precision=1e-3, tolerance=1e-3)
    zones = scan_critical_zones(LIN, 0.0, 1.0, 2.0, cfg)
    assert len(zones) <= 1
    for z in zones:
        assert criticality(LIN, 0.0, 1.0, z.argmin_k2) < 1e-3


def test_scan_parabola_against_dense_oracle():
    f1 = zoo_lookup("f1")
    cfg = SolverConfig(precision=1e-4, tolerance=1e-3)
    zones = scan_critical_zones(f1, 0.0, 0.9938, 2.0, cfg)
    assert len(zones) == 1
    roots = dense_root(f1, 0.0, 0.9938, 0.9938 + 1e-6, 2.0)
    assert len(roots) == 1
    assert abs(zones[0].argmin_k2 - roots[0]) <= 1e-4
    assert abs(zones[0].argmin_k2 - 1.5519) <= 5e-4


@pytest.mark.parametrize("tol", [1e-4, 1e-3, 1e-1, 0.5])
def test_scan_step_is_empty(tol):
    cfg = SolverConfig(precision=1e-3, tolerance=tol)
    assert scan_critical_zones(zoo_lookup("f4"), 0.0, 1.0, 2.0, cfg) == []


def test_scan_constant_is_degenerate():
    cfg = SolverConfig(precision=1e-2, tolerance=1e-3)
    assert scan_critical_zones(CONST, 0.0, 0.5, 2.0, cfg) == []


def test_scan_singular_k1_never_opens():
    cfg = SolverConfig(precision=1e-2, tolerance=1.0)
    assert scan_critical_zones(zoo_lookup("f2"), 0.5, 1.0, 2.0, cfg) == []


@settings(max_examples=80, deadline=None)
@given(
    st.sampled_from(["f1", "f3", "f6", "f7", "f8"]),
    st.floats(0.0, 1.5), st.floats(0.01, 0.4),
    st.sampled_from([1e-3, 1e-2, 1e-1]),
)
def test_zone_invariants(fid, k0, gap, tol):
    fn = zoo_lookup(fid)
    k1 = k0 + gap
    cfg = SolverConfig(precision=1e-3, tolerance=tol)
    zones = scan_critical_zones(fn, k0, k1, 2.0, cfg)
    prev = k1
    for z in zones:
        assert z.zone_start <= z.argmin_k2 <= z.zone_end
        assert cfg.epsilon < z.min_criticality < tol
        assert criticality(fn, k0, k1, z.argmin_k2) == pytest.approx(z.min_criticality, rel=1e-9, abs=1e-15)
        assert z.zone_start > prev
        prev = z.zone_end


def test_zone_candidates_rules():
    inf = np.inf
    c = np.array([5.0, 0.0, 0.5, 0.2, 0.2, 0.9, 5.0, 0.0, 0.0, 5.0, 0.3, 0.1, 0.4, 0.05, 0.6])
    # leading degenerate point does not open; ties keep the first; all-degenerate run never opens
    assert zone_candidates(c, 1.0, 1e-12) == [(2, 6, 3), (10, 15, 13)]
    split = zone_candidates(c, 1.0, 1e-12, split=True)
    assert split == [(2, 6, 3), (10, 15, 11), (10, 15, 13)]
    assert zone_candidates(np.array([inf, inf]), 1.0, 0.0) == []
    # a degenerate point inside a zone is skipped as a candidate
    assert zone_candidates(np.array([0.5, 0.0, 0.7]), 1.0, 1e-12) == [(0, 3, 0)]


def test_scan_accepts_duck_typed_config():
    cfg = SimpleNamespace(precision=1e-3, tolerance=1e-3, epsilon=1e-12)
    a = scan_critical_zones(zoo_lookup("f1"), 0.0, 0.9, 2.0, cfg)
    b = scan_critical_zones(zoo_lookup("f1"), 0.0, 0.9, 2.0, SolverConfig())
    assert a == b


def test_terminal_residual_examples():
    assert terminal_residual(LIN, 0, 1, 2) == pytest.approx(0.0, abs=1e-15)
    assert terminal_residual(zoo_lookup("f1"), *P1, 2.0) <= 2e-3
    assert terminal_residual(CONST, 0.2, 0.9, 1.7) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        terminal_residual(LIN, 1, 1, 2)


def test_full_recurrence_examples():
    r = full_recurrence_residuals(LIN, Partition(Interval(0, 2), (0.5, 1.0, 1.5)))
    assert len(r) == 3 and max(r) <= 1e-12
    r = full_recurrence_residuals(zoo_lookup("f1"), Partition(Interval(0, 2), P1))
    assert max(r) <= 5e-3
    p = Partition(Interval(0, 2), (0.8,))
    assert full_recurrence_residuals(zoo_lookup("f7"), p) == [
        pytest.approx(terminal_residual(zoo_lookup("f7"), 0.0, 0.8, 2.0), abs=1e-15)
    ]
    with pytest.raises(ValueError):
        full_recurrence_residuals(LIN, Partition(Interval(0, 2), ()))


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from(["f1", "f3", "f6", "f7", "f8"]),
    st.lists(st.floats(0.01, 1.99), min_size=1, max_size=10, unique=True),
)
def test_full_recurrence_telescopes(fid, knots):
    fn = zoo_lookup(fid)
    knots = sorted(knots)
    if any(b - a < 1e-6 for a, b in zip(knots, knots[1:])):
        return
    p = Partition(Interval(0, 2), tuple(knots))
    r = three_term_residuals(fn, p)
    acc, tele = 0.0, []
    for ri in r:
        acc = ri - acc  # sum_j (-1)^(i-j) r_j
        tele.append(abs(acc))
    assert np.allclose(full_recurrence_residuals(fn, p), tele, rtol=0, atol=1e-10)


def test_lipschitz_skip_examples():
    assert lipschitz_skip(1.0, LIN, 0.0, 1.0) - 1.0 == pytest.approx(0.5)
    assert lipschitz_skip(3.0, CONST, 0.0, 1.0) == 1.0
    assert lipschitz_skip(4.0, zoo_lookup("f1"), 0.0, 1.0) - 1.0 == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        lipschitz_skip(0.0, LIN, 0.0, 1.0)


@pytest.mark.parametrize("fid", ["f1", "f7"])
def test_lipschitz_skip_sound(fid):
    fn = zoo_lookup(fid)
    K = fn.lipschitz_bound
    rng = np.random.default_rng(17)
    for _ in range(200):
        k0, k1 = np.sort(rng.uniform(0.0, 1.9, 2))
        if k1 - k0 < 1e-3:
            continue
        L = lipschitz_skip(K, fn, k0, k1)
        cfg = SolverConfig(precision=1e-3, tolerance=1e-2, lipschitz=K)
        for z in scan_critical_zones(fn, k0, k1, 2.0, cfg):
            assert z.zone_start >= L
        # oracle: no exact critical point inside (k1, L)
        if L > k1 + 2e-6:
            assert len(dense_root(fn, k0, k1, k1 + 1e-6, min(L, 2.0), step=1e-5)) == 0


def test_step_target_zone_from_jump():
    # for k1 before the jump, k2 just past the jump is near-critical
    g = StepTarget("g", [1.0], [0.0, 1.0])
    assert criticality(g, 0.0, 0.4, 1.0) == 0.0
    assert 0 < criticality(g, 0.0, 0.4, 1.0005) < 1e-3
