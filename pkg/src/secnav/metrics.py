"""Trajectory accuracy metrics and their aggregation over seeded trials."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ZeroLengthTruth


def _points(traj) -> np.ndarray:
    arr = np.asarray(traj, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) array of points, got shape {arr.shape}")
    return arr


def arc_length(traj) -> float:
    """Sum of consecutive point-to-point distances."""
    pts = _points(traj)
    if len(pts) < 2:
        return 0.0
    seg = np.diff(pts, axis=0)
    return math.fsum(np.hypot(seg[:, 0], seg[:, 1]).tolist())


def percent_error(est, truth) -> float:
    """Relative arc-length discrepancy, in percent."""
    est, truth = _points(est), _points(truth)
    if len(est) < 2 or len(truth) < 2:
        raise ValueError("both trajectories need at least two points")
    true_len = arc_length(truth)
    if true_len <= 0:
        raise ZeroLengthTruth("ground-truth trajectory has zero length")
    return abs(arc_length(est) - true_len) / true_len * 100.0


def align(truth, truth_times, est_times) -> np.ndarray:
    """Truth positions linearly interpolated at ``est_times``.

    Times outside the truth's span are held at its first or last point.
    """
    truth = _points(truth)
    tt = np.asarray(truth_times, dtype=float)
    te = np.asarray(est_times, dtype=float)
    if len(tt) != len(truth):
        raise ValueError("truth_times and truth differ in length")
    return np.column_stack([np.interp(te, tt, truth[:, 0]), np.interp(te, tt, truth[:, 1])])


def _paired(est, truth, est_times, truth_times):
    est = _points(est)
    if len(est) == 0:
        raise ValueError("empty trajectory")
    if est_times is None and truth_times is None:
        truth = _points(truth)
        if truth.shape != est.shape:
            raise ValueError("untimed trajectories must have the same number of points")
        return est, truth
    if est_times is None or truth_times is None:
        raise ValueError("pass timestamps for both trajectories or for neither")
    return est, align(truth, truth_times, est_times)


def ade(est, truth, est_times=None, truth_times=None) -> float:
    """Average displacement error between time-aligned trajectories.

    Without timestamps both trajectories must have one point per time step.
    With them, the truth is interpolated at the estimate's timestamps.
    """
    est, ref = _paired(est, truth, est_times, truth_times)
    d = np.hypot(est[:, 0] - ref[:, 0], est[:, 1] - ref[:, 1])
    return math.fsum(d.tolist()) / len(d)


def fde(est, truth) -> float:
    """Distance between the last points of the two trajectories."""
    a, b = _points(est), _points(truth)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty trajectory")
    return float(math.hypot(a[-1, 0] - b[-1, 0], a[-1, 1] - b[-1, 1]))


@dataclass(frozen=True)
class TrajectoryEval:
    percent_error: float
    ade: float
    fde: float
    est_length: float
    true_length: float


def evaluate(est, truth, est_times=None, truth_times=None) -> TrajectoryEval:
    return TrajectoryEval(
        percent_error=percent_error(est, truth),
        ade=ade(est, truth, est_times, truth_times),
        fde=fde(est, truth),
        est_length=arc_length(est),
        true_length=arc_length(truth),
    )


METRIC_NAMES = ("percent_error", "ade", "fde")


@dataclass(frozen=True)
class TrialRecord:
    """Metrics of one navigation run, tagged for grouping."""

    path_class: str
    path_id: str
    approach: str
    percent_error: float
    ade: float
    fde: float
    reached_goal: bool = True
    safety_violations: int = 0
    steps: int = 0
    trial: int = 0


def improvement(baseline: float, candidate: float) -> float:
    """Relative reduction from ``baseline`` to ``candidate``, in percent."""
    if baseline == 0:
        return 0.0 if candidate == 0 else -math.inf
    return (baseline - candidate) / baseline * 100.0


def _mean(xs) -> float:
    xs = list(xs)
    return math.fsum(xs) / len(xs)


@dataclass
class BatchSummary:
    """Per-class and overall metric means for each approach.

    ``means[approach][path_class][metric]`` holds the class means; the key
    ``"average"`` holds the mean over class means, mirroring how the result
    tables report an average column.
    """

    means: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    classes: tuple = ()
    approaches: tuple = ()

    @property
    def trial_count(self) -> int:
        return sum(sum(c.values()) for c in self.counts.values())

    def improvements(self, baseline: str, candidate: str) -> dict:
        """``{path_class or "average": {metric: percent}}`` from baseline to candidate."""
        out = {}
        for cls in (*self.classes, "average"):
            base = self.means[baseline][cls]
            cand = self.means[candidate][cls]
            out[cls] = {m: improvement(base[m], cand[m]) for m in METRIC_NAMES}
        return out


def batch_evaluate(records: Iterable[TrialRecord]) -> BatchSummary:
    groups: Mapping[str, Mapping[str, list]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        groups[r.approach][r.path_class].append(r)
    if not groups:
        raise ValueError("no trial records")
    approaches = tuple(sorted(groups))
    classes = tuple(sorted({c for g in groups.values() for c in g}))
    summary = BatchSummary(classes=classes, approaches=approaches)
    for ap in approaches:
        per_class = {}
        counts = {}
        for cls, recs in sorted(groups[ap].items()):
            per_class[cls] = {m: _mean(getattr(r, m) for r in recs) for m in METRIC_NAMES}
            counts[cls] = len(recs)
        per_class["average"] = {m: _mean(v[m] for v in per_class.values()) for m in METRIC_NAMES}
        summary.means[ap] = per_class
        summary.counts[ap] = counts
    return summary
