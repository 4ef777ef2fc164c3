import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mmd2d.channel import ChannelParams
from mmd2d.game import (BeamwidthGame, OracleBudgetError, UtilityParams, boltzmann_update, build_game, cbws,
                        LogLinearLearner, exhaustive_optimum, is_nash_equilibrium, lll_run, neighborhoods, rbws,
                        select_update_set, stationary_distribution)
from mmd2d.linkdyn import TimingBudget

ACTIONS = [math.radians(b) for b in (15, 25, 35, 45)]
PSI = math.pi / 2
P = ChannelParams()


def _random_game(seed, n=None, i_t=1e-13, spread=100.0):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6)) if n is None else n
    tx = rng.uniform(0.0, spread, (n, 2))
    d = rng.uniform(10.0, 60.0, n)
    ang = rng.uniform(-math.pi, math.pi, n)
    rx = tx + np.column_stack([d * np.cos(ang), d * np.sin(ang)])
    demand = rng.uniform(0.0, 1.0, n) * rng.choice([3e8, 3e9, 3e10])
    game, _ = build_game(P, TimingBudget(), tx, rx, rng.uniform(0.0, 3.0, n), demand, ACTIONS, PSI, 50.0,
                         UtilityParams(interference_threshold=i_t))
    return game


def _toy(u0, u1=None):
    """Interference-free game whose player rates are set directly through the signal."""
    players = [u0] if u1 is None else [u0, u1]
    inf = lambda k: np.full(k, math.inf)  # noqa: E731
    snr = [2.0 ** (np.asarray(u, dtype=float)) - 1.0 for u in players]
    return BeamwidthGame(
        actions=[np.linspace(0.2, 0.2 + 0.1 * (len(u) - 1), len(u)) for u in players], signal=snr,
        gamma=[np.ones(len(u)) for u in players], window=[inf(len(u)) for u in players],
        penalty=np.ones(len(players)), demand=np.zeros(len(players)), neighbors=[()] * len(players),
        interference={}, noise=1.0, bandwidth=1e9, unit=1e9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_vector_utilities_match_per_player(seed):
    game = _random_game(seed)
    rng = np.random.default_rng(seed)
    idx = np.array([rng.integers(s) for s in game.sizes])
    vec = game.utilities(idx)
    for l in range(game.n_players):
        assert vec[l] == pytest.approx(game.individual_utility(l, idx), rel=1e-12, abs=1e-6)
        over = game.total_utility_over_actions(l, idx)
        for a in range(game.sizes[l]):
            dev = idx.copy()
            dev[l] = a
            assert over[a] == pytest.approx(game.total_utility(l, dev), rel=1e-12, abs=1e-6)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_potential_grid_matches_pointwise(seed):
    game = _random_game(seed)
    grid = game.potential_grid()
    for flat in range(grid.size):
        idx = np.array(np.unravel_index(flat, grid.shape)) if game.n_players else np.zeros(0, int)
        assert grid.ravel()[flat] == pytest.approx(game.potential(idx), rel=1e-12, abs=1e-6)


def test_total_utility_examples():
    game = _toy([1.0, 2.0], [3.0, 1.0])
    # no neighbors: total utility is the player's own rate
    assert game.total_utility(0, np.array([1, 0])) == pytest.approx(2e9)
    assert game.potential(np.array([1, 0])) == pytest.approx(5e9)
    assert _toy([1.0]).potential(np.array([0])) == pytest.approx(1e9)


def test_penalty_applies_past_the_window():
    inf_game = _toy([1.0])
    short = BeamwidthGame([np.array([0.3])], [np.array([1.0])], [np.array([1.0])], [np.array([1.0])],
                          penalty=[5e8], demand=[2e9], neighbors=[()], interference={}, noise=1.0,
                          bandwidth=1e9)
    # rate 1 Gbit/s, needs 2 s, has 1 s: epsilon = 0.5
    assert short.individual_utility(0, [0]) == pytest.approx(1e9 - 0.5 * 5e8)
    assert short.penalty_active(0, [0])
    assert not inf_game.penalty_active(0, [0])


def test_boltzmann_examples():
    assert boltzmann_update([1.0, 1.0, 1.0], 0.7) == pytest.approx([1 / 3] * 3)
    u = np.array([0.3, 1.2, -0.4])
    assert boltzmann_update(u + 50.0, 0.5) == pytest.approx(boltzmann_update(u, 0.5))
    assert boltzmann_update(u, 1e-6) == pytest.approx([0, 1, 0])
    assert boltzmann_update(u, 1e6) == pytest.approx([1 / 3] * 3, rel=1e-5)
    assert np.all(np.isfinite(boltzmann_update([1e6, -1e6], 1e-3)))
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            boltzmann_update(u, bad)


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=8), st.floats(0.01, 100))
def test_boltzmann_is_a_distribution(u, tau):
    p = boltzmann_update(u, tau)
    assert p.sum() == pytest.approx(1.0) and np.all(p >= 0)
    assert p[int(np.argmax(u))] == pytest.approx(p.max())


@given(st.integers(1, 12), st.integers(1, 8), st.integers(0, 1000), st.floats(0, 1))
def test_update_set_is_independent(n, cap, seed, density):
    rng = np.random.default_rng(seed)
    adj = np.triu(rng.random((n, n)) < density, 1)
    adj = adj | adj.T
    hood = [tuple(np.flatnonzero(adj[l])) for l in range(n)]
    chosen = select_update_set(n, hood, cap, rng)
    assert 1 <= len(chosen) <= cap and len(set(chosen)) == len(chosen)
    assert not any(adj[a, b] for a in chosen for b in chosen)


def test_update_set_extremes():
    rng = np.random.default_rng(0)
    assert len(select_update_set(10, [()] * 10, 8, rng)) == 8
    complete = [tuple(i for i in range(5) if i != l) for l in range(5)]
    assert len(select_update_set(5, complete, 8, rng)) == 1
    assert len(select_update_set(5, [()] * 5, 1, rng)) == 1


def test_single_player_lll_finds_argmax():
    game = _toy([0.5, 2.0, 1.5, 0.1])
    res = lll_run(game, np.random.default_rng(3))
    assert res.converged and res.indices.tolist() == [1]


def test_two_interfering_links_reach_the_optimum():
    for seed in range(20):
        game = _random_game(seed, n=2, i_t=0.0, spread=30.0)
        if game.n_players < 2 or not game.neighbors[0]:
            continue
        res = lll_run(game, np.random.default_rng(seed), max_iterations=5000)
        best, theta = exhaustive_optimum(game)
        assert game.potential(res.indices) == pytest.approx(theta, rel=1e-6)
        return
    pytest.skip("no interacting pair drawn")


def test_exhaustive_ties_pick_narrowest():
    game = _toy([1.0, 1.0, 0.5], [2.0, 2.0])
    prof, theta = exhaustive_optimum(game)
    assert prof == (0.2, 0.2) and theta == pytest.approx(3e9)
    assert exhaustive_optimum(BeamwidthGame([], [], [], [], [], [], [], {}, 1.0, 1.0)) == ((), 0.0)


def test_exhaustive_budget():
    with pytest.raises(OracleBudgetError):
        exhaustive_optimum(_toy([1.0] * 4, [1.0] * 4), budget=15)


def test_nash_examples():
    game = _toy([1.0, 2.0], [3.0, 1.0])
    assert is_nash_equilibrium(game, np.array([1, 0]))
    assert not is_nash_equilibrium(game, np.array([0, 0]))
    assert is_nash_equilibrium(game, (0.3, 0.2))
    empty = BeamwidthGame([], [], [], [], [], [], [], {}, 1.0, 1.0)
    assert is_nash_equilibrium(empty, np.zeros(0, dtype=int))
    assert lll_run(empty, np.random.default_rng(0)).converged


def test_stationary_distribution_sums_to_one():
    game = _random_game(5, n=2, i_t=0.0, spread=30.0)
    profiles, p = stationary_distribution(game, 0.3)
    assert len(profiles) == math.prod(game.sizes) and p.sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        stationary_distribution(game, 0.0)


def test_constant_and_random_baselines():
    game = _random_game(11, n=4)
    for phi in ACTIONS:
        prof = cbws(game, phi)
        for l, v in enumerate(prof):
            assert v in game.actions[l]
            if game.feasible_value(l, phi):
                assert v == phi
    counts = np.zeros(game.sizes[0])
    for s in range(4000):
        counts[list(game.actions[0]).index(rbws(game, np.random.default_rng(s))[0])] += 1
    assert np.all(np.abs(counts / 4000 - 1 / game.sizes[0]) < 0.03)


def test_cbws_uses_nearest_action_when_infeasible():
    game = _toy([1.0, 1.0, 1.0])  # actions 0.2, 0.3, 0.4
    assert cbws(game, 0.33) == pytest.approx((0.3,))
    assert cbws(game, 0.25) == (0.2,)


def test_neighborhoods():
    tx = np.array([[0.0, 0.0], [20.0, 0.0], [900.0, 900.0]])
    rx = np.array([[0.0, 30.0], [20.0, 30.0], [900.0, 930.0]])
    widest = np.full(3, ACTIONS[-1])
    h = neighborhoods(P, tx, rx, widest, 50.0, 0.0)
    assert 1 in h[0] and 0 in h[1] and h[2] == ()
    for l, hood in enumerate(h):
        for i in hood:
            assert l in h[i]
    assert neighborhoods(P, tx, rx, widest, 50.0, 1.0) == [(), (), ()]
    assert neighborhoods(P, np.zeros((0, 2)), np.zeros((0, 2)), np.zeros(0), 50.0, 0.0) == []


def test_bad_cap_and_asymmetric_neighbors():
    with pytest.raises(ValueError):
        LogLinearLearner(_toy([1.0]), np.random.default_rng(0), cap=0)
    with pytest.raises(ValueError):
        BeamwidthGame([np.ones(1), np.ones(1)], [np.ones(1)] * 2, [np.ones(1)] * 2, [np.ones(1)] * 2,
                      [1, 1], [0, 0], [(1,), ()], {(0, 1): np.zeros((1, 1))}, 1.0, 1.0)
