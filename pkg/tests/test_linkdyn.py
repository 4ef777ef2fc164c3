import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import _highprec as hp
from mmd2d.geometry import RelativeMotion
from mmd2d.linkdyn import (TimingBudget, alignment_efficiency, alignment_time, common_feasible_mask,
                           feasible_beamwidths, link_stability_time, pointing_error, sector_count,
                           stability_time_array)

ACTIONS = [math.radians(b) for b in (15, 25, 35, 45)]
PSI = math.pi / 2
T_P = 10e-6


def test_pointing_error_examples():
    assert pointing_error(RelativeMotion(1.0, math.pi / 2), 100.0, 1.0) == pytest.approx(0.01, rel=1e-12)
    assert pointing_error(RelativeMotion(1.0, 0.0), 100.0, 1.0) == 0.0
    assert pointing_error(RelativeMotion(1.0, 1.0), 100.0, 0.0) == 0.0


def test_stability_examples():
    m = RelativeMotion(1.0, math.pi / 2)
    t = link_stability_time(50.0, math.pi / 6, m, 0.5)
    assert t == pytest.approx(10.09, abs=5e-3)
    assert t == pytest.approx(float(hp.stability_time(50, hp.pi / 6, 1, hp.pi / 2, "0.5")), rel=1e-12)
    assert link_stability_time(50.0, math.pi / 6, m, 1.0) == 0.0
    assert link_stability_time(50.0, math.pi / 3, m, 0.5) == pytest.approx(2 * t)
    assert link_stability_time(50.0, 0.3, RelativeMotion(0.0, 0.0), 0.5) == math.inf
    with pytest.raises(ValueError):
        link_stability_time(50.0, 0.3, m, 0.0)


@given(st.floats(1, 200), st.floats(0.05, 1.5), st.floats(0.01, 5), st.floats(0.01, math.pi - 0.01),
       st.floats(0.05, 0.95))
def test_stability_round_trip_gives_alpha(d, phi, v, mu, alpha):
    t = link_stability_time(d, phi, RelativeMotion(v, mu), alpha)
    ratio = float(hp.gain_ratio_after(hp.mpf(t), hp.mpf(d), hp.mpf(phi), hp.mpf(v), hp.mpf(mu)))
    assert ratio == pytest.approx(alpha, rel=1e-9)


@given(st.floats(1, 200), st.floats(0.05, 1.5), st.floats(0.01, 5), st.floats(0.05, 0.95))
def test_stability_monotone(d, phi, v, alpha):
    base = stability_time_array(d, phi, v, alpha)
    assert stability_time_array(d, phi * 1.1, v, alpha) > base
    assert stability_time_array(d * 1.1, phi, v, alpha) > base
    assert stability_time_array(d, phi, v * 1.1, alpha) < base
    assert stability_time_array(d, phi, v, min(alpha * 1.05, 0.999)) < base


def test_alignment_examples():
    assert alignment_time(PSI, PSI, ACTIONS[0], ACTIONS[0], T_P) == pytest.approx(360e-6)
    assert alignment_time(PSI, PSI, PSI, PSI, T_P) == pytest.approx(T_P)
    with pytest.raises(ValueError):
        alignment_time(PSI, PSI, PSI * 1.1, PSI, T_P)


def test_sector_count_snaps_float_noise():
    assert sector_count(math.radians(90), math.radians(15)) == 6
    assert sector_count(math.radians(90), math.radians(25)) == 4


@given(st.sampled_from(ACTIONS), st.sampled_from(ACTIONS), st.sampled_from(ACTIONS))
def test_narrowing_never_shortens_alignment(a, b, n):
    lo, hi = min(a, b), max(a, b)
    assert alignment_time(PSI, PSI, lo, n, T_P) >= alignment_time(PSI, PSI, hi, n, T_P)


def test_feasible_examples():
    assert len(feasible_beamwidths(ACTIONS, PSI, PSI, T_P, math.inf)) == 16
    widest = max(ACTIONS)
    t_s = PSI * PSI * T_P / widest ** 2 * (1 - 1e-6)
    assert feasible_beamwidths(ACTIONS, PSI, PSI, T_P, t_s) == []


def test_feasible_boundary_equality_kept():
    # a single-sector action on both ends, stability exactly at the bound
    t_s = T_P
    pairs = feasible_beamwidths([PSI], PSI, PSI, T_P, t_s)
    assert pairs == [(PSI, PSI)]


@given(st.floats(1e-5, 1e-2), st.floats(0.5, 2.0))
def test_feasibility_closure(t_s, scale):
    stab = lambda phi: t_s * phi * scale  # noqa: E731
    for phi_m, phi_n in feasible_beamwidths(ACTIONS, PSI, PSI, T_P, stab):
        assert alignment_time(PSI, PSI, phi_m, phi_n, T_P) <= stab(phi_n) * (1 + 1e-12)


@given(st.lists(st.floats(1e-5, 5e-3), min_size=1, max_size=6))
def test_common_mask_matches_pairwise_route(per_link):
    # stability per link and action, linear in the beamwidth
    t_s = np.array([[c * phi / ACTIONS[0] for phi in ACTIONS] for c in per_link])
    mask = common_feasible_mask(ACTIONS, PSI, PSI, T_P, t_s)
    for l, c in enumerate(per_link):
        stab = lambda phi, c=c: c * phi / ACTIONS[0]  # noqa: E731
        pairs = set(feasible_beamwidths(ACTIONS, PSI, PSI, T_P, stab))
        expect = [(phi, phi) in pairs for phi in ACTIONS]
        assert mask[l].tolist() == expect


def test_alignment_efficiency_examples():
    assert alignment_efficiency(0.0, 2.0) == 1.0
    assert alignment_efficiency(2.0, 2.0) == 0.0
    assert alignment_efficiency(1.0, 2.0) == 0.5
    assert alignment_efficiency(3.0, 2.0) == 0.0
    assert alignment_efficiency(1e-3, math.inf) == 1.0


def test_timing_budget_validation():
    with pytest.raises(ValueError):
        TimingBudget(misalignment_threshold=0.0)
    with pytest.raises(ValueError):
        TimingBudget(t_pilot=-1.0)
    assert TimingBudget().association_exchange == pytest.approx(3e-3)
