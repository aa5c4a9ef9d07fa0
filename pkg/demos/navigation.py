"""
Safe navigation along one built-in corridor with both approaches.

Runs the motion-model-only navigator and the filtered navigator on the
same noisy path, prints their metrics and writes a map of both runs.
"""
import os
from pathlib import Path

from secnav.metrics import evaluate
from secnav.navigator import APPROACHES, navigate
from secnav.plotting import plot_trajectories
from secnav.scenario import builtin_scenario


def main():
    out_dir = Path(os.environ.get("SECNAV_OUT", "secnav-out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    sc = builtin_scenario(0)
    path = sc.path("PC3-3")
    cor = sc.corridor(path)
    print(f"path {path.id}: {len(cor)} segments, centroid polyline {cor.centroid_polyline_length():.1f} m")
    runs = {}
    for ap in APPROACHES:
        o = navigate(cor, ap, None, sc.noise.process, sc.noise.measurement, sc.map.landmarks, seed=1)
        ev = evaluate(o.estimated_xy(), o.true_xy(), o.times, o.times)
        print(f"  {ap:16s} goal={o.reached_goal} steps={o.steps} reroutes={o.reroutes} "
              f"violations={o.safety_violations}  pe={ev.percent_error:.2f}% ade={ev.ade:.3f} m fde={ev.fde:.3f} m")
        runs[ap] = o
    fig = out_dir / "demo_navigation.svg"
    plot_trajectories(sc, path, cor, runs, fig)
    print("map written to", fig)


if __name__ == "__main__":
    main()
