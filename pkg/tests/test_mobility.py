import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltdps.exceptions import DomainError
from ltdps.mobility import (P1, BoundlessParams, GaussMarkovParams, KinematicState,
                            WalkStateMatrix, gen_direction_trajectory, gen_prob_walk_trajectory,
                            gen_walk_trajectory, gen_waypoint_trajectory, on_boundary, reflect,
                            step_boundless, step_gauss_markov, step_prob_walk)


class _Fixed:
    """RNG stand-in returning preset uniform/normal draws."""

    def __init__(self, uniform=0.0, normal=0.0):
        self.u, self.n = uniform, normal

    def uniform(self, lo, hi):
        return self.u

    def normal(self, mu, sigma):
        return self.n


# -- boundless area ------------------------------------------------------------

def test_boundless_zero_perturbation_moves_along_heading():
    s = step_boundless(KinematicState(0.0, 0.0, 2.0, 0.0), BoundlessParams(3, 1, 1), _Fixed())
    assert (s.x, s.y, s.v, s.theta) == (2.0, 0.0, 2.0, 0.0)


def test_boundless_speed_clamped_at_vmax():
    s = step_boundless(KinematicState(1, 1, 3.0, 0.0), BoundlessParams(3, 1, 1), _Fixed(uniform=0.7))
    assert s.v == 3.0
    s = step_boundless(KinematicState(1, 1, 0.2, 0.0), BoundlessParams(3, 1, 1), _Fixed(uniform=-0.9))
    assert s.v == 0.0


def test_boundless_wraps_to_opposite_side():
    s = step_boundless(KinematicState(5.5, 3.0, 1.0, 0.0), BoundlessParams(2, 0, 0), _Fixed())
    assert s.x == pytest.approx(0.5)
    s = step_boundless(KinematicState(0.2, 3.0, 1.0, math.pi), BoundlessParams(2, 0, 0), _Fixed())
    assert s.x == pytest.approx(5.2)


def test_boundless_invariants_over_long_run():
    rng = np.random.default_rng(3)
    p = BoundlessParams(v_max=1.7, a_max=0.6, max_angular_change=0.8)
    s = KinematicState(3, 3, 0.5, 1.0)
    for _ in range(20000):
        s = step_boundless(s, p, rng)
        assert 0.0 <= s.v <= p.v_max
        assert 0.0 <= s.x < 6.0 and 0.0 <= s.y < 6.0
        assert 0.0 <= s.theta < 2 * math.pi


def test_boundless_perturbation_ranges():
    rng = np.random.default_rng(9)
    p = BoundlessParams(v_max=100, a_max=0.5, max_angular_change=0.25, dt=2.0)
    s0 = KinematicState(3, 3, 50.0, 3.0)
    for _ in range(2000):
        s = step_boundless(s0, p, rng)
        assert abs(s.v - 50.0) <= 1.0 + 1e-12
        assert abs(s.theta - 3.0) <= 0.5 + 1e-12


def test_boundless_rejects_negative_params():
    with pytest.raises(DomainError):
        BoundlessParams(-1, 1, 1)


# -- Gauss-Markov ---------------------------------------------------------------

def test_gauss_markov_alpha_one_is_bit_exact():
    rng = np.random.default_rng(1)
    p = GaussMarkovParams(alpha=1.0, mean_speed=5.0, mean_direction=2.0)
    s = KinematicState(0.0, 0.0, 0.37, 0.91)
    for _ in range(1000):
        s = step_gauss_markov(s, p, rng)
        assert s.v == 0.37 and s.theta == 0.91


def test_gauss_markov_alpha_zero_is_mean_plus_draw():
    p = GaussMarkovParams(alpha=0.0, mean_speed=1.5, mean_direction=0.3)
    s = step_gauss_markov(KinematicState(0, 0, 9.0, 2.0), p, _Fixed(normal=0.25))
    assert s.v == pytest.approx(1.75)
    assert s.theta == pytest.approx(0.55)


def test_gauss_markov_alpha_zero_lag1_autocorrelation():
    rng = np.random.default_rng(2024)
    p = GaussMarkovParams(alpha=0.0, mean_speed=1.0, mean_direction=0.0)
    s = KinematicState(0, 0, 1.0, 0.0)
    speeds = []
    for _ in range(10000):
        s = step_gauss_markov(s, p, rng)
        speeds.append(s.v)
    v = np.array(speeds)
    rho = np.corrcoef(v[:-1], v[1:])[0, 1]
    assert abs(rho) < 0.05


def test_gauss_markov_position_uses_previous_speed_and_direction():
    p = GaussMarkovParams(alpha=0.5, mean_speed=10.0, mean_direction=1.0)
    s = step_gauss_markov(KinematicState(0.0, 0.0, 2.0, 0.0), p, _Fixed())
    assert (s.x, s.y) == (2.0, 0.0)


def test_gauss_markov_edge_steers_toward_centre():
    p = GaussMarkovParams(alpha=0.0, mean_speed=0.5, mean_direction=math.pi)
    s = step_gauss_markov(KinematicState(0.1, 3.0, 0.0, 0.0), p, _Fixed(), area=(6.0, 6.0))
    assert s.theta == pytest.approx(0.0)
    inner = step_gauss_markov(KinematicState(3.0, 3.0, 0.0, 0.0), p, _Fixed(), area=(6.0, 6.0))
    assert inner.theta == pytest.approx(math.pi)


def test_gauss_markov_stays_in_area():
    rng = np.random.default_rng(5)
    p = GaussMarkovParams(alpha=0.75, mean_speed=0.4, mean_direction=0.0)
    s = KinematicState(3, 3, 0.4, 0.0)
    for _ in range(5000):
        s = step_gauss_markov(s, p, rng, area=(6.0, 6.0))
        assert 0 <= s.x <= 6 and 0 <= s.y <= 6


@pytest.mark.parametrize("alpha", [-0.1, 1.1])
def test_gauss_markov_alpha_bounds(alpha):
    with pytest.raises(DomainError):
        GaussMarkovParams(alpha=alpha, mean_speed=1, mean_direction=0)


# -- probabilistic walk -------------------------------------------------------------

def test_p1_empirical_transitions():
    rng = np.random.default_rng(77)
    counts = np.zeros((3, 3))
    xs = ys = 0
    for _ in range(100000):
        nx, ny, _ = step_prob_walk(xs, ys, P1, 1.0, rng)
        counts[xs, nx] += 1
        counts[ys, ny] += 1
        xs, ys = nx, ny
    freq = counts / counts.sum(axis=1, keepdims=True)
    assert np.all(np.abs(freq - P1.matrix) <= 0.02)
    assert counts[0, 0] == 0 and counts[1, 2] == 0 and counts[2, 1] == 0


def test_prob_walk_displacement_mapping():
    m = WalkStateMatrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    rng = np.random.default_rng(0)
    assert step_prob_walk(0, 1, m, 0.5, rng) == (2, 1, (0.5, -0.5))
    assert step_prob_walk(2, 2, m, 0.5, rng) == (0, 0, (0.0, 0.0))


@pytest.mark.parametrize("bad", [
    [[0.5, 0.5, 0.1], [0, 1, 0], [0, 0, 1]],
    [[1, 0], [0, 1]],
    [[-0.5, 1.5, 0], [0, 1, 0], [0, 0, 1]],
])
def test_non_stochastic_matrix_rejected(bad):
    with pytest.raises(DomainError):
        WalkStateMatrix(bad)
    with pytest.raises(DomainError):
        step_prob_walk(0, 0, bad, 1.0, np.random.default_rng())


def test_prob_walk_trajectory_in_area():
    traj = gen_prob_walk_trajectory(KinematicState(3, 3), 2000, np.random.default_rng(4))
    assert len(traj) == 2001
    assert all(0 <= s.x <= 6 and 0 <= s.y <= 6 for s in traj)


# -- trajectory generators --------------------------------------------------------------

def test_reflection_mirrors_angle():
    x, y, theta = reflect(6.5, 3.0, math.radians(30), (6.0, 6.0))
    assert (x, y) == pytest.approx((5.5, 3.0))
    assert theta == pytest.approx(math.radians(150))
    x, y, theta = reflect(2.0, -0.25, math.radians(-60), (6.0, 6.0))
    assert y == pytest.approx(0.25)
    assert theta == pytest.approx(math.radians(60))


def test_walk_stays_inside():
    traj = gen_walk_trajectory(KinematicState(0.5, 0.5), 3000, np.random.default_rng(8))
    assert all(0 <= s.x <= 6 and 0 <= s.y <= 6 for s in traj)


def test_waypoint_pauses_and_bounds():
    traj = gen_waypoint_trajectory(KinematicState(3, 3), 500, np.random.default_rng(6), pause_time=2)
    assert len(traj) == 501
    assert traj[1] == traj[2] == KinematicState(3, 3, 0.0, 0.0)
    assert all(0 <= s.x <= 6 and 0 <= s.y <= 6 for s in traj)
    assert all(s.v <= 1.0 for s in traj)


def test_waypoint_without_pause_never_stops():
    traj = gen_waypoint_trajectory(KinematicState(3, 3), 400, np.random.default_rng(6), pause_time=0)
    assert all(s.v > 0 for s in traj[1:])


def test_direction_pauses_only_on_boundary():
    traj = gen_direction_trajectory(KinematicState(3, 3), 800, np.random.default_rng(10))
    pauses = [s for s in traj[1:] if s.v == 0.0]
    assert pauses
    assert all(on_boundary(s) for s in pauses)


@pytest.mark.parametrize("gen", [gen_walk_trajectory, gen_waypoint_trajectory,
                                 gen_direction_trajectory, gen_prob_walk_trajectory])
def test_empty_area_rejected(gen):
    with pytest.raises(DomainError):
        gen(KinematicState(0, 0), 5, np.random.default_rng(), area=(0.0, 6.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_generators_are_seed_deterministic(seed):
    a = gen_waypoint_trajectory(KinematicState(1, 1), 50, np.random.default_rng(seed))
    b = gen_waypoint_trajectory(KinematicState(1, 1), 50, np.random.default_rng(seed))
    assert a == b
