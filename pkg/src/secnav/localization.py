"""Landmark-based localization with a simulated ranging front end.

Image capture, landmark recognition and stereo depth are replaced by a range
oracle that returns the true anchor distance plus Gaussian noise.  The back
end is the real one: pick three well-spread anchors, solve the linearised
trilateration system by least squares, then polish the fix by minimising the
range residuals.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DegenerateGeometry, InsufficientAnchors, NonConvergence
from .geometry import Point2
from .motion import EntityState

#: triples spanning less than this triangle area (m^2) are treated as collinear
MIN_TRIANGLE_AREA = 1.0
DEFAULT_DETECT_RANGE = 50.0


@dataclass(frozen=True)
class Landmark:
    id: int
    position: Point2
    cluster_id: int


@dataclass(frozen=True)
class RangeMeasurement:
    landmark_id: int
    distance: float

    def __post_init__(self):
        if not (math.isfinite(self.distance) and self.distance >= 0):
            raise ValueError("range must be finite and >= 0")


@dataclass(frozen=True)
class MeasurementNoise:
    """Standard deviations of the simulated range and speed sensors.

    The default range deviation reproduces centimetre-level static fixes
    (per-axis RMSE of a few centimetres on the built-in map).
    """

    sigma_range: float = 0.02
    sigma_speed: float = 0.05

    def __post_init__(self):
        if self.sigma_range < 0 or self.sigma_speed < 0:
            raise ValueError("noise deviations must be >= 0")

    @classmethod
    def zero(cls) -> "MeasurementNoise":
        return cls(0.0, 0.0)


class LandmarkIndex:
    """Landmark table with a coordinate array for vectorised range queries."""

    def __init__(self, landmarks: Sequence[Landmark]):
        self.landmarks = tuple(landmarks)
        self.xy = np.array([lm.position for lm in self.landmarks], dtype=float).reshape(-1, 2)
        self.ids = np.array([lm.id for lm in self.landmarks], dtype=np.int64)

    def __len__(self):
        return len(self.landmarks)

    def within(self, p, radius: float) -> list[Landmark]:
        """Landmarks within ``radius`` of ``p``, nearest first (ties by id)."""
        d2 = (self.xy[:, 0] - p[0]) ** 2 + (self.xy[:, 1] - p[1]) ** 2
        idx = np.flatnonzero(d2 <= radius * radius)
        order = idx[np.lexsort((self.ids[idx], d2[idx]))]
        return [self.landmarks[i] for i in order.tolist()]


def triangle_area(a, b, c) -> float:
    return 0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _as_index(landmarks) -> LandmarkIndex:
    return landmarks if isinstance(landmarks, LandmarkIndex) else LandmarkIndex(landmarks)


def select_trilateration_set(
    true_pos,
    landmarks,
    detect_range: float = DEFAULT_DETECT_RANGE,
    min_area: float = MIN_TRIANGLE_AREA,
) -> list[Landmark]:
    """Nearest three in-range landmarks that are not nearly collinear.

    Candidate triples are tried in lexicographic order of their distance ranks,
    so the first acceptable one is the "nearest" in that sense.
    """
    cands = _as_index(landmarks).within(true_pos, detect_range)
    if len(cands) < 3:
        raise InsufficientAnchors(f"{len(cands)} landmark(s) within {detect_range} m")
    for trio in combinations(cands, 3):
        if triangle_area(*(lm.position for lm in trio)) >= min_area:
            return list(trio)
    raise DegenerateGeometry("every in-range landmark triple is nearly collinear")


def simulate_ranges(
    true_pos,
    anchors: Sequence[Landmark],
    noise: MeasurementNoise,
    rng: np.random.Generator | None = None,
) -> list[RangeMeasurement]:
    """True anchor distances plus independent Gaussian errors, floored at zero."""
    if not anchors:
        raise ValueError("no anchors supplied")
    eps = None
    if noise.sigma_range > 0 and rng is not None:
        eps = rng.standard_normal(len(anchors)) * noise.sigma_range
    out = []
    for i, lm in enumerate(anchors):
        d = math.hypot(true_pos[0] - lm.position[0], true_pos[1] - lm.position[1])
        if eps is not None:
            d = max(0.0, d + float(eps[i]))
        out.append(RangeMeasurement(lm.id, d))
    return out


def _pairs(anchors, ranges):
    if len(anchors) != len(ranges):
        raise ValueError("anchors and ranges differ in length")
    for lm, r in zip(anchors, ranges):
        if lm.id != r.landmark_id:
            raise ValueError(f"range for landmark {r.landmark_id} paired with landmark {lm.id}")
    return [lm.position for lm in anchors], [r.distance for r in ranges]


def trilaterate_linear(anchors: Sequence[Landmark], ranges: Sequence[RangeMeasurement]) -> Point2:
    """Least-squares position from subtracting the first range circle from the rest.

    Each remaining anchor ``i`` contributes the row
    ``2 (L_i - L_0) . p = |L_i|^2 - |L_0|^2 - d_i^2 + d_0^2``.
    Coordinates are taken relative to ``L_0`` to keep the system well scaled.
    """
    pos, dist = _pairs(anchors, ranges)
    if len(pos) < 3:
        raise DegenerateGeometry("trilateration needs at least three anchors")
    x0, y0 = pos[0]
    d0 = dist[0]
    # normal equations of the 2-column system, accumulated by hand
    s_xx = s_xy = s_yy = b_x = b_y = 0.0
    for (xi, yi), di in zip(pos[1:], dist[1:]):
        ax, ay = 2.0 * (xi - x0), 2.0 * (yi - y0)
        rhs = (xi - x0) ** 2 + (yi - y0) ** 2 - di * di + d0 * d0
        s_xx += ax * ax
        s_xy += ax * ay
        s_yy += ay * ay
        b_x += ax * rhs
        b_y += ay * rhs
    det = s_xx * s_yy - s_xy * s_xy
    if det <= 1e-12 * max(s_xx * s_yy, 1e-300):
        raise DegenerateGeometry("anchors are collinear; normal matrix is singular")
    px = (s_yy * b_x - s_xy * b_y) / det
    py = (s_xx * b_y - s_xy * b_x) / det
    return Point2(x0 + px, y0 + py)


def range_cost(p, anchor_xy, dist) -> float:
    """Sum of squared range residuals at ``p``."""
    return math.fsum((math.hypot(p[0] - ax, p[1] - ay) - d) ** 2 for (ax, ay), d in zip(anchor_xy, dist))


def _cost_derivs(px, py, anchor_xy, dist):
    """Cost, half-gradient and half-Hessian of the range-residual cost at ``(px, py)``."""
    cost = gx = gy = hxx = hxy = hyy = 0.0
    for (ax, ay), d in zip(anchor_xy, dist):
        dx, dy = px - ax, py - ay
        r = math.hypot(dx, dy)
        res = r - d
        cost += res * res
        if r == 0.0:
            continue
        ux, uy = dx / r, dy / r
        gx += res * ux
        gy += res * uy
        # d2/dp2 of (r - d)^2 / 2 = u u^T + (res / r) (I - u u^T)
        k = res / r
        hxx += ux * ux + k * (1.0 - ux * ux)
        hxy += ux * uy - k * ux * uy
        hyy += uy * uy + k * (1.0 - uy * uy)
    return cost, gx, gy, hxx, hxy, hyy


def refine_position(
    initial,
    anchors: Sequence[Landmark],
    ranges: Sequence[RangeMeasurement],
    gtol: float = 1e-9,
    max_iter: int = 200,
) -> Point2:
    """Minimise the range-residual cost starting from ``initial``.

    Damped Newton iteration on the 2-D cost with its exact Hessian; the damping
    grows until a step lowers the cost, so the result is never worse than the
    starting point.  Emits :class:`NonConvergence` when the iteration cap is hit
    with a gradient norm above 1e-6.
    """
    anchor_xy, dist = _pairs(anchors, ranges)
    px, py = float(initial[0]), float(initial[1])
    cost, gx, gy, hxx, hxy, hyy = _cost_derivs(px, py, anchor_xy, dist)
    lam = 0.0
    for _ in range(max_iter):
        # gx, gy hold half the gradient
        if 2.0 * math.hypot(gx, gy) <= gtol:
            break
        improved = False
        while True:
            axx, ayy = hxx + lam, hyy + lam
            det = axx * ayy - hxy * hxy
            if det > 0 and axx > 0:
                sx = -(ayy * gx - hxy * gy) / det
                sy = -(axx * gy - hxy * gx) / det
                trial = _cost_derivs(px + sx, py + sy, anchor_xy, dist)
                if trial[0] < cost:
                    px, py = px + sx, py + sy
                    cost, gx, gy, hxx, hxy, hyy = trial
                    lam *= 0.1
                    improved = True
                    break
            if lam > 1e12:
                break
            lam = max(lam * 10.0, 1e-6 * (abs(hxx) + abs(hyy) + 1e-12))
        if not improved:
            break
    else:
        if 2.0 * math.hypot(gx, gy) > 1e-6:
            warnings.warn(
                f"refinement stopped after {max_iter} iterations, |grad| = {2 * math.hypot(gx, gy):.3g}",
                NonConvergence,
                stacklevel=2,
            )
    return Point2(px, py)


def lanbloc_fix(true_pos, landmarks, detect_range, noise: MeasurementNoise, rng=None) -> Point2:
    """Position-only fix: select anchors, range them, trilaterate, refine."""
    anchors = select_trilateration_set(true_pos, landmarks, detect_range)
    ranges = simulate_ranges(true_pos, anchors, noise, rng)
    guess = trilaterate_linear(anchors, ranges)
    return refine_position(guess, anchors, ranges)


def lanbloc_measure(
    true_state: EntityState,
    landmarks,
    detect_range: float = DEFAULT_DETECT_RANGE,
    noise: MeasurementNoise | None = None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Measurement vector ``(x, y, v)``: a landmark fix plus a noisy speed reading."""
    noise = MeasurementNoise() if noise is None else noise
    fix = lanbloc_fix(true_state.position, landmarks, detect_range, noise, rng)
    v = true_state.velocity
    if noise.sigma_speed > 0 and rng is not None:
        v += float(rng.standard_normal()) * noise.sigma_speed
    return np.array([fix[0], fix[1], v])
