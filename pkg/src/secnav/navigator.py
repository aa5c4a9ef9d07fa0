"""Safe-corridor navigation loop and the two localization approaches it compares.

``APPROACH_BMM`` predicts with the bare motion model from the latest landmark
fix.  ``APPROACH_EKF`` predicts and corrects with the filter.  Both check the
predicted position against the current and next segment hulls before moving.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import ekf as kf
from .errors import DegenerateGeometry, InsufficientAnchors
from .geometry import Point2, point_in_convex_hull
from .localization import DEFAULT_DETECT_RANGE, LandmarkIndex, MeasurementNoise, lanbloc_measure
from .motion import ControlInput, EntityState, MotionParams, ProcessNoise, compute_control, normalize_angle, step
from .scenario import SafeCorridor

APPROACH_BMM = "BMM+LanBLoc"
APPROACH_EKF = "BMM+EKF+LanBLoc"
APPROACHES = (APPROACH_BMM, APPROACH_EKF)


class Decision(enum.Enum):
    MOVE_AHEAD = "move_ahead"
    ADVANCE_SEGMENT = "advance_segment"
    REROUTE = "reroute"


def safety_check(predicted, corridor: SafeCorridor, current_index: int) -> Decision:
    if not 0 <= current_index < len(corridor):
        raise IndexError(f"segment index {current_index} out of range")
    if point_in_convex_hull(predicted, corridor.hulls[current_index]):
        return Decision.MOVE_AHEAD
    nxt = current_index + 1
    if nxt < len(corridor) and point_in_convex_hull(predicted, corridor.hulls[nxt]):
        return Decision.ADVANCE_SEGMENT
    return Decision.REROUTE


@dataclass(frozen=True)
class NavConfig:
    desired_speed: float = 4.0
    goal_threshold: float = 2.0
    reroute_speed_factor: float = 0.5
    detect_range: float = DEFAULT_DETECT_RANGE
    step_cap_factor: float = 10.0
    min_heading_baseline: float = 0.5


@dataclass
class NavigationOutcome:
    """Record of one run.

    ``trajectory`` holds the navigator's own position track (what the approach
    believes it travelled); ``true_trajectory`` holds the simulated truth.
    Both start with the initial state at ``t = 0``.
    """

    approach: str
    times: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)
    true_trajectory: list = field(default_factory=list)
    predicted: list = field(default_factory=list)
    decisions: list = field(default_factory=list)
    segment_indices: list = field(default_factory=list)
    control_log: list = field(default_factory=list)
    reached_goal: bool = False
    step_cap_exceeded: bool = False
    safety_violations: int = 0
    missed_fixes: int = 0

    @property
    def steps(self) -> int:
        return len(self.control_log)

    @property
    def reroutes(self) -> int:
        return sum(d is Decision.REROUTE for d in self.decisions)

    def estimated_xy(self) -> np.ndarray:
        return np.array([s.position for s in self.trajectory], dtype=float)

    def true_xy(self) -> np.ndarray:
        return np.array([s.position for s in self.true_trajectory], dtype=float)


class _Estimator:
    """Navigator's view of its own state, one implementation per approach."""

    def state(self) -> EntityState:
        raise NotImplementedError

    def predict(self, u: ControlInput) -> Point2:
        raise NotImplementedError

    def advance(self, u: ControlInput, z) -> None:
        raise NotImplementedError


class _MotionModelEstimator(_Estimator):
    """Latest fix for position, speed sensor for speed, heading from successive fixes."""

    def __init__(self, init: EntityState, params: MotionParams, min_baseline: float):
        self.s = init
        self.params = params
        self.min_baseline = min_baseline

    def state(self):
        return self.s

    def predict(self, u):
        return step(self.s, u, self.params).position

    def advance(self, u, z):
        dead = step(self.s, u, self.params)
        if z is None:
            self.s = dead
            return
        x, y = float(z[0]), float(z[1])
        dx, dy = x - self.s.position[0], y - self.s.position[1]
        heading = math.atan2(dy, dx) if math.hypot(dx, dy) >= self.min_baseline else dead.heading
        v = min(max(float(z[2]), 0.0), self.params.v_max)
        self.s = EntityState(Point2(x, y), v, normalize_angle(heading))


class _FilterEstimator(_Estimator):
    def __init__(self, init: EntityState, params: MotionParams, cfg: kf.FilterConfig, P0):
        self.belief = kf.BeliefState(init.as_vector(), P0)
        self.params = params
        self.cfg = cfg

    def state(self):
        return self.belief.as_state()

    def predict(self, u):
        return Point2(*kf.transition(self.belief.mean, u, self.params)[:2])

    def advance(self, u, z):
        b = kf.predict(self.belief, u, self.params, self.cfg)
        if z is not None:
            b = kf.update(b, z, self.cfg)
        self.belief = b


def default_filter_config(process: ProcessNoise, position_sigma: float, speed_sigma: float) -> kf.FilterConfig:
    """Filter covariances matched to the simulated noise levels.

    Zero deviations are floored so the matrices stay usable.
    """
    q = [process.sigma_x, process.sigma_y, process.sigma_v, process.sigma_theta]
    Q = np.diag([max(s, 1e-4) ** 2 for s in q])
    R = np.diag([max(position_sigma, 1e-4) ** 2] * 2 + [max(speed_sigma, 1e-4) ** 2])
    return kf.FilterConfig(Q=Q, R=R)


def _leg_speed(dist: float, cruise: float, heading_change: float, params: MotionParams) -> float:
    """Speed command that splits the remaining leg into equal steps.

    The last step then lands on the waypoint instead of overshooting it.  When
    the heading error exceeds one step's turn budget the speed is scaled down,
    which keeps the turning radius (and the corner cut) small.
    """
    reach = cruise * params.dt
    n = max(1, math.ceil(dist / reach - 1e-9))
    speed = dist / (n * params.dt)
    excess = abs(heading_change)
    if excess > params.max_turn:
        speed *= params.max_turn / excess
    return max(speed, 1e-6)


def navigate(
    corridor: SafeCorridor,
    approach: str,
    params: MotionParams | None = None,
    process_noise: ProcessNoise | None = None,
    measurement_noise: MeasurementNoise | None = None,
    landmarks=None,
    seed: int | None = 0,
    config: NavConfig | None = None,
    filter_config: kf.FilterConfig | None = None,
    position_sigma: float | None = None,
) -> NavigationOutcome:
    """Guide an entity from ``corridor.start`` to ``corridor.goal``.

    The entity steers through the segment centroids in order and finally to the
    goal.  Each step it forms a control toward the current waypoint, predicts
    the next position, and checks the prediction against the current and next
    segment hulls.  If the prediction leaves both, the control is recomputed
    toward the next segment's centroid at reduced speed.  Then the (noisy) true
    entity moves, a landmark fix is taken and the estimate is updated.

    The run ends once the estimated position is within ``goal_threshold`` of the
    goal, or after ``step_cap_factor`` times the nominal number of steps.

    ``position_sigma`` is the filter's assumed per-axis fix error; when omitted
    it is taken as the range deviation.
    """
    if approach not in APPROACHES:
        raise ValueError(f"unknown approach {approach!r}; expected one of {APPROACHES}")
    params = params or MotionParams()
    process_noise = ProcessNoise() if process_noise is None else process_noise
    measurement_noise = MeasurementNoise() if measurement_noise is None else measurement_noise
    cfg = config or NavConfig()
    if landmarks is None:
        raise ValueError("landmarks are required for localization")
    index = landmarks if isinstance(landmarks, LandmarkIndex) else LandmarkIndex(landmarks)
    if not point_in_convex_hull(corridor.start, corridor.hulls[0]):
        raise ValueError("start position lies outside the first segment hull")
    rng = np.random.default_rng(seed)

    waypoints = corridor.waypoints()
    goal = corridor.goal
    wp = 0
    first = waypoints[0]
    heading0 = math.atan2(first[1] - corridor.start[1], first[0] - corridor.start[0])
    truth = EntityState(corridor.start, cfg.desired_speed, normalize_angle(heading0))

    if approach == APPROACH_EKF:
        if filter_config is None:
            sig = measurement_noise.sigma_range if position_sigma is None else position_sigma
            filter_config = default_filter_config(process_noise, sig, measurement_noise.sigma_speed)
        est: _Estimator = _FilterEstimator(truth, params, filter_config, kf.DEFAULT_P0)
    else:
        est = _MotionModelEstimator(truth, params, cfg.min_heading_baseline)

    nominal = corridor.centroid_polyline_length() / (cfg.desired_speed * params.dt)
    cap = max(10, int(math.ceil(cfg.step_cap_factor * nominal)))

    out = NavigationOutcome(approach)
    out.times.append(0.0)
    out.trajectory.append(est.state())
    out.true_trajectory.append(truth)
    seg = 0
    last = len(corridor) - 1
    for k in range(1, cap + 1):
        belief = est.state()
        target = waypoints[wp]
        dist = math.dist(belief.position, target)
        u, _ = compute_control(belief, target, cfg.desired_speed, params)
        speed = _leg_speed(dist, cfg.desired_speed, u.heading_change, params)
        u = ControlInput(speed, u.heading_change)
        # the waypoint is passed once this step is planned to reach it
        arrives = speed * params.dt >= dist - 1e-9
        predicted = est.predict(u)
        decision = safety_check(predicted, corridor, seg)
        if decision is Decision.ADVANCE_SEGMENT:
            seg += 1
        elif decision is Decision.REROUTE:
            target = corridor.centroids[seg + 1] if seg < last else goal
            wp = max(wp, seg + 1 if seg < last else len(waypoints) - 1)
            dist = math.dist(belief.position, target)
            u, _ = compute_control(belief, target, cfg.desired_speed, params)
            slow = cfg.reroute_speed_factor * cfg.desired_speed
            u = ControlInput(min(slow, _leg_speed(dist, slow, u.heading_change, params)), u.heading_change)
            arrives = u.desired_speed * params.dt >= dist - 1e-9
            predicted = est.predict(u)
        if arrives and wp < len(waypoints) - 1:
            wp += 1

        truth = step(truth, u, params, process_noise, rng)
        try:
            z = lanbloc_measure(truth, index, cfg.detect_range, measurement_noise, rng)
        except (InsufficientAnchors, DegenerateGeometry):
            z = None
            out.missed_fixes += 1
        est.advance(u, z)

        out.times.append(k * params.dt)
        out.trajectory.append(est.state())
        out.true_trajectory.append(truth)
        out.predicted.append(predicted)
        out.decisions.append(decision)
        out.segment_indices.append(seg)
        out.control_log.append(u)
        if not corridor.contains(truth.position, seg):
            out.safety_violations += 1
        if math.dist(est.state().position, goal) <= cfg.goal_threshold:
            out.reached_goal = True
            break
    else:
        out.step_cap_exceeded = True
    return out
