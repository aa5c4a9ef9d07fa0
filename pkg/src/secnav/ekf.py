"""Extended Kalman filter whose prediction step is the battlefield motion model.

State order is ``(x, y, v, theta)``.  Measurements are ``(x, y, v)`` from the
landmark fix and speed sensor, so the observation model is linear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import SingularInnovation
from .motion import ControlInput, EntityState, MotionParams, applied_turn, normalize_angle, step, velocity_clamped

H_POS_SPEED = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)
DEFAULT_P0 = np.diag([1.0, 1.0, 0.25, 0.05])
MAX_CONDITION = 1e12


def _default_q():
    return np.diag([0.05**2, 0.05**2, 0.05**2, 0.01**2])


def _default_r():
    return np.diag([0.03**2, 0.03**2, 0.05**2])


@dataclass
class FilterConfig:
    Q: np.ndarray = field(default_factory=_default_q)
    R: np.ndarray = field(default_factory=_default_r)
    H: np.ndarray = field(default_factory=lambda: H_POS_SPEED.copy())

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=float)
        self.R = np.asarray(self.R, dtype=float)
        self.H = np.asarray(self.H, dtype=float)
        if self.Q.shape != (4, 4):
            raise ValueError("Q must be 4x4")
        if self.H.shape[1] != 4 or self.R.shape != (self.H.shape[0],) * 2:
            raise ValueError("H must be mx4 and R mxm")
        for name, m in (("Q", self.Q), ("R", self.R)):
            if not np.allclose(m, m.T):
                raise ValueError(f"{name} must be symmetric")
            if np.linalg.eigvalsh(m).min() < -1e-12:
                raise ValueError(f"{name} must be positive semi-definite")
        if np.linalg.cond(self.R) > MAX_CONDITION:
            raise ValueError("R must be invertible")


@dataclass(frozen=True)
class BeliefState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(4)
        mean[3] = normalize_angle(mean[3])
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", np.array(self.cov, dtype=float).reshape(4, 4))

    @classmethod
    def from_state(cls, state: EntityState, cov=None) -> "BeliefState":
        return cls(state.as_vector(), DEFAULT_P0 if cov is None else cov)

    @property
    def position(self) -> tuple[float, float]:
        return float(self.mean[0]), float(self.mean[1])

    def as_state(self) -> EntityState:
        # the filter may nudge speed slightly negative; the state type forbids it
        vec = self.mean.copy()
        vec[2] = max(vec[2], 0.0)
        return EntityState.from_vector(vec)


def _symmetrize(P: np.ndarray) -> np.ndarray:
    return 0.5 * (P + P.T)


def transition(mean, u: ControlInput, params: MotionParams) -> np.ndarray:
    """Noiseless motion step applied to a raw state vector.

    Unlike :func:`motion.step` this does not clamp a negative speed coming out
    of an update, so it stays differentiable for the Jacobian check.
    """
    x, y, v, th = (float(c) for c in mean)
    v1 = velocity_clamped(v, u, params)[0]
    th1 = th + applied_turn(u, params)
    d = v1 * params.dt
    return np.array([x + d * math.cos(th1), y + d * math.sin(th1), v1, normalize_angle(th1)])


def jacobian_f(mean, u: ControlInput, params: MotionParams) -> np.ndarray:
    """Jacobian of the noiseless transition with respect to ``(x, y, v, theta)``.

    Saturations use the subgradient convention: the speed row is zero when a
    limit other than the acceleration ramp decided the new speed.
    """
    v = float(mean[2])
    v1, saturated = velocity_clamped(v, u, params)
    gv = 0.0 if saturated else 1.0
    th1 = float(mean[3]) + applied_turn(u, params)
    dt = params.dt
    c, s = math.cos(th1), math.sin(th1)
    return np.array(
        [
            [1.0, 0.0, gv * dt * c, -v1 * dt * s],
            [0.0, 1.0, gv * dt * s, v1 * dt * c],
            [0.0, 0.0, gv, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def predict(belief: BeliefState, u: ControlInput, params: MotionParams, cfg: FilterConfig) -> BeliefState:
    F = jacobian_f(belief.mean, u, params)
    P = F @ belief.cov @ F.T + cfg.Q
    return BeliefState(transition(belief.mean, u, params), _symmetrize(P))


def gain(P: np.ndarray, cfg: FilterConfig) -> tuple[np.ndarray, np.ndarray]:
    """Kalman gain and innovation covariance for prior covariance ``P``."""
    H = cfg.H
    S = H @ P @ H.T + cfg.R
    if not np.all(np.isfinite(S)):
        raise SingularInnovation("innovation covariance is not finite")
    # S is symmetric, so its condition number is the eigenvalue ratio
    ev = np.abs(np.linalg.eigvalsh(0.5 * (S + S.T)))
    if ev.min() * MAX_CONDITION < ev.max():
        raise SingularInnovation("innovation covariance is not invertible")
    # K = P H^T S^-1, via a solve on the symmetric S
    K = np.linalg.solve(S, H @ P).T
    return K, S


def update(belief: BeliefState, z, cfg: FilterConfig) -> BeliefState:
    """Fold measurement ``z`` into ``belief``.

    The measurement carries no angle, so the residual is a plain difference.
    """
    z = np.asarray(z, dtype=float)
    P = belief.cov
    K, _ = gain(P, cfg)
    resid = z - cfg.H @ belief.mean
    mean = belief.mean + K @ resid
    P_post = (np.eye(4) - K @ cfg.H) @ P
    return BeliefState(mean, _symmetrize(P_post))


def joseph_update(P: np.ndarray, K: np.ndarray, cfg: FilterConfig) -> np.ndarray:
    """Joseph-form covariance update, valid for any gain."""
    A = np.eye(4) - K @ cfg.H
    return A @ P @ A.T + K @ cfg.R @ K.T


def run_filter(
    initial: BeliefState,
    controls: Sequence[ControlInput],
    measurements: Sequence,
    params: MotionParams,
    cfg: FilterConfig,
) -> list[BeliefState]:
    """Predict with each control; update whenever the matching measurement is not None.

    Returns the posterior after every step (``len(controls)`` beliefs).
    """
    if len(controls) != len(measurements):
        raise ValueError("controls and measurements must be aligned per step")
    belief = initial
    out = []
    for u, z in zip(controls, measurements):
        belief = predict(belief, u, params, cfg)
        if z is not None:
            belief = update(belief, z, cfg)
        out.append(belief)
    return out


def simulate_truth(initial: EntityState, controls, params, noise=None, rng=None) -> list[EntityState]:
    """Roll the true motion model forward; convenience for filter experiments."""
    states = []
    s = initial
    for u in controls:
        s = step(s, u, params, noise, rng)
        states.append(s)
    return states
