"""Continuous mobility models: random walk, random waypoint, random direction,
boundless (torus) area, Gauss-Markov and Chiang's probabilistic random walk.

All randomness is drawn from an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class KinematicState:
    x: float
    y: float
    v: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class BoundlessParams:
    v_max: float
    a_max: float
    max_angular_change: float
    dt: float = 1.0

    def __post_init__(self):
        if min(self.v_max, self.a_max, self.max_angular_change, self.dt) < 0:
            raise DomainError("boundless parameters must be non-negative")


@dataclass(frozen=True)
class GaussMarkovParams:
    alpha: float
    mean_speed: float
    mean_direction: float
    speed_sigma: float = 1.0
    direction_sigma: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.speed_sigma < 0 or self.direction_sigma < 0:
            raise DomainError("sigmas must be non-negative")


class WalkStateMatrix:
    """3x3 row-stochastic matrix over the states {0: stay, 1: back, 2: forward}."""

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise DomainError(f"walk matrix must be 3x3, got {m.shape}")
        if (m < 0).any() or (m > 1).any() or not np.allclose(m.sum(axis=1), 1.0, atol=1e-12, rtol=0):
            raise DomainError("walk matrix must be row-stochastic")
        self.matrix = m
        self.matrix.setflags(write=False)
        self._cdf = np.cumsum(m, axis=1)

    def __repr__(self):
        return f"WalkStateMatrix({self.matrix.tolist()!r})"

    def next_state(self, state: int, rng: np.random.Generator) -> int:
        u = rng.random()
        cdf = self._cdf[state]
        # last column guards against cumulative rounding below 1
        return int(min(np.searchsorted(cdf, u, side="right"), 2))


P1 = WalkStateMatrix([[0.0, 0.5, 0.5],
                      [0.3, 0.7, 0.0],
                      [0.3, 0.0, 0.7]])

_STATE_MOVE = (0.0, -1.0, 1.0)


def _check_area(area):
    w, h = area
    if not (w > 0 and h > 0):
        raise DomainError(f"simulation area must be non-empty, got {area}")
    return float(w), float(h)


def step_boundless(state: KinematicState, params: BoundlessParams,
                   rng: np.random.Generator, area=(6.0, 6.0)) -> KinematicState:
    """One update of the boundless-area model; the area is a torus."""
    w, h = _check_area(area)
    dv = rng.uniform(-params.a_max * params.dt, params.a_max * params.dt)
    dtheta = rng.uniform(-params.max_angular_change * params.dt,
                         params.max_angular_change * params.dt)
    v = min(max(state.v + dv, 0.0), params.v_max)
    theta = (state.theta + dtheta) % TWO_PI
    # position advances with the speed and heading held before this update
    x = _wrap(state.x + state.v * math.cos(state.theta), w)
    y = _wrap(state.y + state.v * math.sin(state.theta), h)
    return KinematicState(x, y, v, theta)


def _wrap(u, size):
    u %= size
    # a tiny negative input rounds up to ``size`` itself
    return 0.0 if u >= size else u


def _centre_bearing(x, y, w, h):
    return math.atan2(h / 2.0 - y, w / 2.0 - x)


def step_gauss_markov(state: KinematicState, params: GaussMarkovParams,
                      rng: np.random.Generator, area=None,
                      edge_margin: float = 0.1) -> KinematicState:
    """One Gauss-Markov update.

    Position moves with the previous speed and direction. When ``area`` is given
    and the node is within ``edge_margin`` (fraction of the dimension) of an edge,
    the mean direction is replaced by the bearing to the area centre and the new
    position is clipped into the area.
    """
    a = params.alpha
    mean_dir = params.mean_direction
    if area is not None:
        w, h = _check_area(area)
        mx, my = edge_margin * w, edge_margin * h
        if state.x < mx or state.x > w - mx or state.y < my or state.y > h - my:
            mean_dir = _centre_bearing(state.x, state.y, w, h)
    noise = math.sqrt(1.0 - a * a)
    s_draw = rng.normal(0.0, params.speed_sigma)
    d_draw = rng.normal(0.0, params.direction_sigma)
    speed = a * state.v + (1.0 - a) * params.mean_speed + noise * s_draw
    direction = a * state.theta + (1.0 - a) * mean_dir + noise * d_draw
    x = state.x + state.v * math.cos(state.theta)
    y = state.y + state.v * math.sin(state.theta)
    if area is not None:
        x = min(max(x, 0.0), w)
        y = min(max(y, 0.0), h)
    return KinematicState(x, y, speed, direction)


def step_prob_walk(x_state: int, y_state: int, matrix: WalkStateMatrix,
                   step_len: float, rng: np.random.Generator):
    """Advance both axis states independently; returns ``(x_state, y_state, (dx, dy))``."""
    if not isinstance(matrix, WalkStateMatrix):
        matrix = WalkStateMatrix(matrix)
    nx = matrix.next_state(x_state, rng)
    ny = matrix.next_state(y_state, rng)
    return nx, ny, (_STATE_MOVE[nx] * step_len, _STATE_MOVE[ny] * step_len)


def gen_prob_walk_trajectory(start: KinematicState, n_steps: int, rng: np.random.Generator,
                             matrix: WalkStateMatrix = P1, step_len: float = 1.0,
                             area=(6.0, 6.0)) -> list[KinematicState]:
    w, h = _check_area(area)
    xs, ys = 0, 0
    traj = [start]
    x, y = start.x, start.y
    for _ in range(n_steps):
        xs, ys, (dx, dy) = step_prob_walk(xs, ys, matrix, step_len, rng)
        # a move that would leave the area is cancelled and the axis resets to "stay"
        if not 0.0 <= x + dx <= w:
            dx, xs = 0.0, 0
        if not 0.0 <= y + dy <= h:
            dy, ys = 0.0, 0
        x, y = x + dx, y + dy
        traj.append(KinematicState(x, y, math.hypot(dx, dy), math.atan2(dy, dx) % TWO_PI))
    return traj


def reflect(x: float, y: float, theta: float, area) -> tuple[float, float, float]:
    """Fold a point back into the area, mirroring the heading on each wall hit."""
    w, h = area
    dx, dy = math.cos(theta), math.sin(theta)
    for _ in range(64):
        if x < 0.0:
            x, dx = -x, -dx
        elif x > w:
            x, dx = 2 * w - x, -dx
        elif y < 0.0:
            y, dy = -y, -dy
        elif y > h:
            y, dy = 2 * h - y, -dy
        else:
            break
    return x, y, math.atan2(dy, dx) % TWO_PI


def gen_walk_trajectory(start: KinematicState, n_steps: int, rng: np.random.Generator,
                        speed_range=(0.2, 1.0), area=(6.0, 6.0)) -> list[KinematicState]:
    """Memoryless random walk: fresh direction and speed every step, bouncing off walls."""
    w, h = _check_area(area)
    lo, hi = speed_range
    if lo > hi or lo < 0:
        raise DomainError(f"bad speed range {speed_range}")
    traj = [start]
    x, y = start.x, start.y
    for _ in range(n_steps):
        theta = rng.uniform(0.0, TWO_PI)
        v = rng.uniform(lo, hi)
        x, y, theta = reflect(x + v * math.cos(theta), y + v * math.sin(theta), theta, (w, h))
        traj.append(KinematicState(x, y, v, theta))
    return traj


def _travel(traj, x, y, tx, ty, speed, n_steps):
    dist = math.hypot(tx - x, ty - y)
    theta = math.atan2(ty - y, tx - x) % TWO_PI
    ticks = max(1, math.ceil(dist / speed)) if dist > 0 else 0
    for k in range(1, ticks + 1):
        if len(traj) > n_steps:
            break
        if k == ticks:
            traj.append(KinematicState(tx, ty, speed, theta))
        else:
            f = k * speed / dist
            traj.append(KinematicState(x + f * (tx - x), y + f * (ty - y), speed, theta))
    return traj[-1].x, traj[-1].y


def _pause(traj, x, y, pause_time, n_steps):
    for _ in range(int(pause_time)):
        if len(traj) > n_steps:
            break
        traj.append(KinematicState(x, y, 0.0, 0.0))


def gen_waypoint_trajectory(start: KinematicState, n_steps: int, rng: np.random.Generator,
                            min_speed: float = 0.2, max_speed: float = 1.0,
                            pause_time: int = 3, area=(6.0, 6.0)) -> list[KinematicState]:
    """Random waypoint sampled once per tick: pause, pick a destination and speed, travel."""
    w, h = _check_area(area)
    if min_speed > max_speed or min_speed <= 0:
        raise DomainError(f"need 0 < min_speed <= max_speed, got {min_speed}, {max_speed}")
    if pause_time < 0:
        raise DomainError("pause_time must be >= 0")
    traj = [start]
    x, y = start.x, start.y
    while len(traj) <= n_steps:
        _pause(traj, x, y, pause_time, n_steps)
        tx, ty = rng.uniform(0.0, w), rng.uniform(0.0, h)
        speed = rng.uniform(min_speed, max_speed)
        x, y = _travel(traj, x, y, tx, ty, speed, n_steps)
    return traj[: n_steps + 1]


def _to_boundary(x, y, theta, w, h):
    dx, dy = math.cos(theta), math.sin(theta)
    tx = (w - x) / dx if dx > 1e-12 else (-x / dx if dx < -1e-12 else math.inf)
    ty = (h - y) / dy if dy > 1e-12 else (-y / dy if dy < -1e-12 else math.inf)
    if tx <= ty:
        return (w if dx > 0 else 0.0), min(max(y + tx * dy, 0.0), h)
    return min(max(x + ty * dx, 0.0), w), (h if dy > 0 else 0.0)


def gen_direction_trajectory(start: KinematicState, n_steps: int, rng: np.random.Generator,
                             min_speed: float = 0.2, max_speed: float = 1.0,
                             pause_time: int = 3, area=(6.0, 6.0)) -> list[KinematicState]:
    """Random direction: head off at a random angle until a wall, pause there, repeat."""
    w, h = _check_area(area)
    if min_speed > max_speed or min_speed <= 0:
        raise DomainError(f"need 0 < min_speed <= max_speed, got {min_speed}, {max_speed}")
    traj = [start]
    x, y = start.x, start.y
    while len(traj) <= n_steps:
        theta = rng.uniform(0.0, TWO_PI)
        speed = rng.uniform(min_speed, max_speed)
        bx, by = _to_boundary(x, y, theta, w, h)
        if math.hypot(bx - x, by - y) < 1e-12:
            continue
        x, y = _travel(traj, x, y, bx, by, speed, n_steps)
        _pause(traj, x, y, pause_time, n_steps)
    return traj[: n_steps + 1]


def on_boundary(state: KinematicState, area=(6.0, 6.0), tol: float = 1e-9) -> bool:
    w, h = area
    return (abs(state.x) <= tol or abs(state.x - w) <= tol
            or abs(state.y) <= tol or abs(state.y - h) <= tol)


__all__ = [
    "KinematicState", "BoundlessParams", "GaussMarkovParams", "WalkStateMatrix", "P1",
    "step_boundless", "step_gauss_markov", "step_prob_walk", "gen_prob_walk_trajectory",
    "gen_walk_trajectory", "gen_waypoint_trajectory", "gen_direction_trajectory",
    "reflect", "on_boundary",
]
