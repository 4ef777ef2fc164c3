import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mmd2d.geometry import (MPH_TO_MPS, Node, Position, Role, Trajectory, distance, draw_trajectories,
                            pairwise_distances, place_uniform, relative_motion, relative_motion_arrays, wrap_angle)

finite = st.floats(-1e4, 1e4, allow_nan=False)


def test_expected_count_matches_density():
    counts = [len(place_uniform(1000.0, 40.0, 0.5, np.random.default_rng(s))) for s in range(200)]
    assert abs(np.mean(counts) - 40.0) < 3 * math.sqrt(40.0 / 200)


def test_full_arena_expected_count():
    nodes = place_uniform(10_000.0, 40.0, 0.5, np.random.default_rng(0))
    assert abs(len(nodes) - 4000) < 4 * math.sqrt(4000)


def test_zero_density_gives_empty_list():
    assert place_uniform(2000.0, 0.0, 0.5, np.random.default_rng(0)) == []


def test_same_seed_same_nodes():
    a = place_uniform(500.0, 100.0, 0.3, np.random.default_rng(9))
    b = place_uniform(500.0, 100.0, 0.3, np.random.default_rng(9))
    assert a == b


def test_placement_is_uniform_and_inside():
    nodes = place_uniform(1000.0, 10_000.0, 0.5, np.random.default_rng(1))
    xy = np.array([[n.position.x, n.position.y] for n in nodes])
    assert np.all(np.abs(xy) <= 500.0)
    sigma = 1000.0 / math.sqrt(12 * len(xy))
    assert np.all(np.abs(xy.mean(axis=0)) < 3 * sigma)
    frac_tx = np.mean([n.role is Role.TRANSMITTER for n in nodes])
    assert abs(frac_tx - 0.5) < 0.02


def test_speeds_follow_mph_range():
    speeds, headings = draw_trajectories(10_000, np.random.default_rng(2))
    assert speeds.min() >= 1.0 * MPH_TO_MPS and speeds.max() <= 3.0 * MPH_TO_MPS
    assert np.all(np.abs(headings) <= math.pi)


@pytest.mark.parametrize("bad", [dict(arena_side=0.0), dict(role_mix=1.5), dict(density=-1.0)])
def test_place_uniform_rejects_bad_input(bad):
    kw = dict(arena_side=100.0, density=10.0, role_mix=0.5)
    kw.update(bad)
    with pytest.raises(ValueError):
        place_uniform(kw["arena_side"], kw["density"], kw["role_mix"], np.random.default_rng(0))


def test_distance_examples():
    assert distance(Position(0, 0), Position(3, 4)) == 5.0
    assert distance(Position(2, 7), Position(2, 7)) == 0.0


@given(finite, finite, finite, finite)
def test_distance_symmetric(ax, ay, bx, by):
    a, b = Position(ax, ay), Position(bx, by)
    assert distance(a, b) == distance(b, a)


def test_pairwise_distances_matches_scalar():
    rng = np.random.default_rng(3)
    a, b = rng.uniform(-50, 50, (5, 2)), rng.uniform(-50, 50, (4, 2))
    d = pairwise_distances(a, b)
    for i in range(5):
        for j in range(4):
            assert d[i, j] == pytest.approx(distance(Position(*a[i]), Position(*b[j])), rel=1e-12)


@given(st.floats(-50, 50, allow_nan=False))
def test_wrap_angle_range(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)


def _node(x, y, speed, heading):
    return Node(0, Role.REQUESTER, Position(x, y), Trajectory(speed, heading))


def test_relative_motion_examples():
    rx_static, tx_static = _node(0, 0, 0, 0), _node(10, 0, 0, 0)
    assert relative_motion(rx_static, tx_static) == relative_motion(rx_static, tx_static)
    assert relative_motion(rx_static, tx_static).relative_speed == 0.0
    perp = relative_motion(_node(0, 0, 1.0, math.pi / 2), tx_static)
    assert perp.relative_speed == pytest.approx(1.0)
    assert perp.relative_angle == pytest.approx(math.pi / 2)
    toward = relative_motion(_node(0, 0, 1.0, 0.0), tx_static)
    assert toward.relative_angle == pytest.approx(0.0)


@given(st.floats(0, 5), st.floats(-4, 4), st.floats(0, 5), st.floats(-4, 4))
def test_swapping_trajectories_keeps_speed(s1, h1, s2, h2):
    a = relative_motion(_node(0, 0, s1, h1), _node(20, 5, s2, h2))
    b = relative_motion(_node(0, 0, s2, h2), _node(20, 5, s1, h1))
    assert a.relative_speed == pytest.approx(b.relative_speed, abs=1e-12)
    assert 0.0 <= a.relative_angle <= math.pi


def test_relative_motion_arrays_zero_speed_angle():
    speed, angle = relative_motion_arrays(np.zeros((1, 2)), np.array([[1.0, 0.0]]))
    assert speed[0] == 0.0 and angle[0] == 0.0


def test_trajectory_validation():
    with pytest.raises(ValueError):
        Trajectory(-1.0, 0.0)
    assert Trajectory(1.0, 3 * math.pi).heading == pytest.approx(math.pi)
