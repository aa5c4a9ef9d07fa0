"""Battlefield motion model: speed, heading and position updates for one time step.

The deterministic model is recovered exactly when every process-noise
deviation is zero.  Terrain degrades agility by scaling the acceleration and
deceleration limits with a factor in (0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroSpeed
from .geometry import Point2

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle into [-pi, pi)."""
    wrapped = (theta + math.pi) % TWO_PI - math.pi
    if wrapped >= math.pi:
        wrapped -= TWO_PI
    return wrapped


def clip(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


@dataclass(frozen=True)
class MotionParams:
    accel_limit: float = 1.5
    decel_limit: float = 1.5
    maneuverability: float = 0.6
    v_max: float = 10.0
    dt: float = 1.0
    terrain_factor: float = 1.0

    def __post_init__(self):
        for name in ("accel_limit", "decel_limit", "maneuverability", "v_max", "dt"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0 < self.terrain_factor <= 1:
            raise ValueError("terrain_factor must lie in (0, 1]")

    @property
    def max_turn(self) -> float:
        """Largest heading change allowed in one step."""
        return self.maneuverability * self.dt


@dataclass(frozen=True)
class ProcessNoise:
    sigma_x: float = 0.05
    sigma_y: float = 0.05
    sigma_theta: float = 0.01
    sigma_v: float = 0.05

    def __post_init__(self):
        if min(self.sigma_x, self.sigma_y, self.sigma_theta, self.sigma_v) < 0:
            raise ValueError("noise deviations must be >= 0")

    @classmethod
    def zero(cls) -> "ProcessNoise":
        return cls(0.0, 0.0, 0.0, 0.0)

    @property
    def is_zero(self) -> bool:
        return not (self.sigma_x or self.sigma_y or self.sigma_theta or self.sigma_v)

    def draw(self, rng: np.random.Generator) -> tuple[float, float, float, float]:
        """One set of draws ordered (velocity, heading, x, y)."""
        z = rng.standard_normal(4)
        return (
            float(z[0]) * self.sigma_v,
            float(z[1]) * self.sigma_theta,
            float(z[2]) * self.sigma_x,
            float(z[3]) * self.sigma_y,
        )


@dataclass(frozen=True)
class EntityState:
    position: Point2
    velocity: float
    heading: float

    @property
    def x(self) -> float:
        return self.position[0]

    @property
    def y(self) -> float:
        return self.position[1]

    def as_vector(self) -> np.ndarray:
        """State vector in filter order (x, y, v, theta)."""
        return np.array([self.position[0], self.position[1], self.velocity, self.heading])

    @classmethod
    def from_vector(cls, vec) -> "EntityState":
        return cls(Point2(float(vec[0]), float(vec[1])), float(vec[2]), normalize_angle(float(vec[3])))


@dataclass(frozen=True)
class ControlInput:
    desired_speed: float
    heading_change: float

    def __post_init__(self):
        if not (math.isfinite(self.desired_speed) and self.desired_speed >= 0):
            raise ValueError("desired_speed must be finite and >= 0")


def velocity_clamped(v: float, u: ControlInput, params: MotionParams) -> tuple[float, bool]:
    """Noiseless speed update and whether a limit other than the ramp was binding.

    The second item is False when the result is ``v +/- tau*a*dt`` (the only
    branch that depends on ``v``); the filter Jacobian uses it.
    """
    tau = params.terrain_factor
    if u.desired_speed > v:
        ramp = v + tau * params.accel_limit * params.dt
        out = min(ramp, u.desired_speed, params.v_max)
    else:
        ramp = v - tau * params.decel_limit * params.dt
        out = max(ramp, u.desired_speed, 0.0)
    return out, out != ramp


def update_velocity(v: float, u: ControlInput, params: MotionParams, noise_draw: float = 0.0) -> float:
    out = velocity_clamped(v, u, params)[0]
    if noise_draw:
        out = clip(out + noise_draw, 0.0, params.v_max)
    return out


def applied_turn(u: ControlInput, params: MotionParams) -> float:
    lim = params.max_turn
    return clip(u.heading_change, -lim, lim)


def update_heading(theta: float, u: ControlInput, params: MotionParams, noise_draw: float = 0.0) -> float:
    return normalize_angle(theta + applied_turn(u, params) + noise_draw)


def step(
    state: EntityState,
    u: ControlInput,
    params: MotionParams,
    noise: ProcessNoise | None = None,
    rng: np.random.Generator | None = None,
) -> EntityState:
    """Advance ``state`` by one time step under control ``u``.

    With ``noise`` and ``rng`` supplied, four normal draws are consumed in the
    order velocity, heading, x, y; otherwise the step is deterministic.
    """
    ev = eth = ex = ey = 0.0
    if noise is not None and rng is not None and not noise.is_zero:
        ev, eth, ex, ey = noise.draw(rng)
    v1 = update_velocity(state.velocity, u, params, ev)
    th1 = update_heading(state.heading, u, params, eth)
    d = v1 * params.dt
    x1 = state.position[0] + d * math.cos(th1) + ex
    y1 = state.position[1] + d * math.sin(th1) + ey
    return EntityState(Point2(x1, y1), v1, th1)


def compute_control(
    current: EntityState,
    target,
    desired_speed: float,
    params: MotionParams | None = None,
) -> tuple[ControlInput, float]:
    """Control that points the entity at ``target`` and the time to get there.

    Returns the heading change (not yet clipped to the turn limit) together
    with ``distance / desired_speed``.
    """
    if not desired_speed > 0:
        raise ZeroSpeed(f"desired speed must be > 0, got {desired_speed}")
    dx = target[0] - current.position[0]
    dy = target[1] - current.position[1]
    dist = math.hypot(dx, dy)
    if dist == 0.0:
        raise ValueError("target coincides with the current position")
    dtheta = normalize_angle(math.atan2(dy, dx) - current.heading)
    return ControlInput(desired_speed, dtheta), dist / desired_speed

