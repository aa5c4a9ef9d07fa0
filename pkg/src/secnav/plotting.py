"""Static SVG figures: corridor map with trajectories, and metric bar charts."""
from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import metrics as M  # noqa: E402
from .navigator import APPROACHES  # noqa: E402

# fixed ids and no timestamp, so identical input gives an identical file
plt.rcParams["svg.hashsalt"] = "secnav"
_SVG_META = {"Date": None}

METRIC_LABELS = {"percent_error": "percent error (%)", "ade": "ADE (m)", "fde": "FDE (m)"}
_COLORS = {APPROACHES[0]: "tab:red", APPROACHES[1]: "tab:blue"}


def max_deviation(outcome) -> float:
    """Largest distance between the observed and the true position at equal steps."""
    d = outcome.estimated_xy() - outcome.true_xy()
    return float(np.hypot(d[:, 0], d[:, 1]).max())


def plot_trajectories(scenario, path, corridor, outcomes: dict, filename) -> None:
    """Map of landmarks, corridor hulls, ground truth and each approach's run.

    Solid lines are where the entity went; dotted lines are what the
    navigator believed.  The legend carries each run's maximum deviation.
    """
    fig, ax = plt.subplots(figsize=(7, 7))
    xy = np.array([lm.position for lm in scenario.map.landmarks])
    ax.scatter(xy[:, 0], xy[:, 1], s=6, c="0.55", label="landmarks")
    for k, hull in enumerate(corridor.hulls):
        v = hull.as_array()
        ax.fill(v[:, 0], v[:, 1], color="tab:green", alpha=0.12, lw=0.6, ec="tab:green",
                label="safe corridor" if k == 0 else None)
    truth = scenario.ground_truth(path).polyline
    ax.plot(truth[:, 0], truth[:, 1], "k--", lw=1, label="ground truth")
    for ap, o in outcomes.items():
        c = _COLORS.get(ap, "tab:purple")
        t, e = o.true_xy(), o.estimated_xy()
        ax.plot(t[:, 0], t[:, 1], "-", color=c, lw=1.2, label=f"{ap} true")
        ax.plot(e[:, 0], e[:, 1], ":", color=c, lw=1.2,
                label=f"{ap} observed (max dev {max_deviation(o):.3f} m)")
    ax.set_aspect("equal")
    ax.set_xlim(0, scenario.map.width)
    ax.set_ylim(0, scenario.map.height)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(f"path {path.id} ({path.path_class})")
    ax.legend(loc="upper left", fontsize=7)
    fig.tight_layout()
    fig.savefig(filename, format="svg", metadata=_SVG_META)
    plt.close(fig)


def plot_metric_bars(summary: M.BatchSummary, filename) -> None:
    """One panel per metric; one group of bars per path class, one bar per approach."""
    approaches = [a for a in APPROACHES if a in summary.approaches]
    classes = list(summary.classes)
    x = np.arange(len(classes))
    width = 0.8 / len(approaches)
    fig, axes = plt.subplots(1, len(M.METRIC_NAMES), figsize=(12, 4))
    for ax, metric in zip(axes, M.METRIC_NAMES):
        for k, ap in enumerate(approaches):
            vals = [summary.means[ap][c][metric] for c in classes]
            ax.bar(x + (k - (len(approaches) - 1) / 2) * width, vals, width,
                   color=_COLORS.get(ap, "tab:purple"), label=ap)
        ax.set_xticks(x, classes)
        ax.set_title(METRIC_LABELS[metric])
    axes[0].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(filename, format="svg", metadata=_SVG_META)
    plt.close(fig)
