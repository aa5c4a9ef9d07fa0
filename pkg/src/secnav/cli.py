"""Command-line front end: ``secnav generate | run | plot``.

Exit status is 0 on success, 2 for bad arguments or configuration, 3 when the
scenario cannot be read, and 4 for any other failure.  The default output
directory is ``$SECNAV_OUT`` when set, else ``./secnav-out``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from .errors import ScenarioError
from .experiment import (
    APPROACH_KEYS, ExperimentConfig, read_records, run_experiment, selected_paths, simulate_trial,
    with_margin, write_results,
)
from .localization import MeasurementNoise
from .motion import MotionParams
from .navigator import NavConfig
from .scenario import FIELD_NOISE, NoiseConfig, builtin_scenario, dumps, load_scenario

EXIT_OK, EXIT_CONFIG, EXIT_SCENARIO, EXIT_RUNTIME = 0, 2, 3, 4
OUT_ENV = "SECNAV_OUT"


class ConfigError(ValueError):
    pass


def default_out() -> Path:
    return Path(os.environ.get(OUT_ENV) or "secnav-out")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return v
    return conv


def _non_negative(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="secnav", description="Safe-corridor navigation experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write the built-in battlefield scenario to a file")
    g.add_argument("--seed", type=int, default=0, help="landmark layout seed")
    g.add_argument("--width", type=_positive(float), default=200.0)
    g.add_argument("--height", type=_positive(float), default=200.0)
    g.add_argument("--margin", type=_positive(float), default=5.0, help="corridor half-width (m)")
    g.add_argument("--segment-len", type=_positive(float), default=20.0, help="corridor segment length (m)")
    g.add_argument("--out", type=Path, help="scenario file (default: <out dir>/scenario.json)")

    r = sub.add_parser("run", help="run seeded trials and write results.csv and summary.txt")
    r.add_argument("--scenario", type=Path, help="scenario file (default: built-in layout, seed 0)")
    r.add_argument("--trials", type=_positive(int), default=1000, help="trials per path and approach")
    r.add_argument("--seed", type=int, default=0, help="base seed; trial i uses seed + i")
    r.add_argument("--approach", choices=sorted(APPROACH_KEYS), default="both")
    r.add_argument("--paths", nargs="+", metavar="ID", help="restrict to these path ids")
    r.add_argument("--out", type=Path, help="output directory")
    r.add_argument("--margin", type=_positive(float), help="override every path's corridor margin (m)")
    r.add_argument("--sigma-range", type=_non_negative, help="range noise deviation (m)")
    r.add_argument("--sigma-speed", type=_non_negative, help="speed sensor deviation (m/s)")
    r.add_argument("--dt", type=_positive(float), help="time step (s)")
    r.add_argument("--speed", type=_positive(float), help="desired cruise speed (m/s)")
    r.add_argument("--jobs", type=_positive(int), default=1, help="worker processes")

    p = sub.add_parser("plot", help="draw SVG figures from a results directory")
    p.add_argument("--results", type=Path, help="results directory (default: the output directory)")
    p.add_argument("--scenario", type=Path, help="scenario file (default: the copy in the results directory)")
    p.add_argument("--out", type=Path, help="figure directory (default: the results directory)")
    p.add_argument("--path", dest="path_id", help="path to draw (default: the first one in the results)")
    p.add_argument("--trial", type=int, default=0, help="trial to re-simulate for the map figure")
    return ap


def cmd_generate(args) -> int:
    sc = builtin_scenario(args.seed, args.width, args.height, args.margin, args.segment_len)
    # corridor construction fails loudly on a broken layout, so check before writing
    for path in sc.paths:
        sc.corridor(path)
    out = args.out or default_out() / "scenario.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(dumps(sc), encoding="utf-8")
    print(f"wrote {out} ({len(sc.map.landmarks)} landmarks, {len(sc.paths)} paths)")
    return EXIT_OK


def _load(path):
    return builtin_scenario(0) if path is None else load_scenario(path)


def experiment_config(args, scenario) -> ExperimentConfig:
    motion = MotionParams() if args.dt is None else MotionParams(dt=args.dt)
    nav = NavConfig() if args.speed is None else NavConfig(desired_speed=args.speed)
    noise = scenario.noise or FIELD_NOISE
    meas = noise.measurement
    if args.sigma_range is not None or args.sigma_speed is not None:
        meas = MeasurementNoise(
            meas.sigma_range if args.sigma_range is None else args.sigma_range,
            meas.sigma_speed if args.sigma_speed is None else args.sigma_speed,
        )
    try:
        return ExperimentConfig(
            approaches=APPROACH_KEYS[args.approach],
            trials=args.trials,
            seed=args.seed,
            motion=motion,
            noise=NoiseConfig(noise.process, meas),
            nav=nav,
            path_ids=None if args.paths is None else tuple(args.paths),
            jobs=args.jobs,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_run(args) -> int:
    sc = _load(args.scenario)
    if args.margin is not None:
        sc = with_margin(sc, args.margin)
    cfg = experiment_config(args, sc)
    try:
        selected_paths(sc, cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    t0 = time.perf_counter()
    records = run_experiment(sc, cfg)
    out = args.out or default_out()
    files = write_results(out, dumps(sc), cfg, records)
    print(files["summary"].read_text(), end="")
    print(f"{len(records)} runs in {time.perf_counter() - t0:.1f} s; results in {out}")
    return EXIT_OK


def cmd_plot(args) -> int:
    from . import metrics as M
    from .plotting import plot_metric_bars, plot_trajectories

    res = args.results or default_out()
    csv_path = res / "results.csv"
    records = read_records(csv_path) if csv_path.exists() else []
    if not records:
        print(f"warning: no results in {res}; nothing to plot", file=sys.stderr)
        return EXIT_OK
    cfg_path = res / "run_config.json"
    if not cfg_path.exists():
        raise ConfigError(f"{cfg_path} is missing")
    cfg = ExperimentConfig.from_dict(json.loads(cfg_path.read_text()))
    sc = load_scenario(args.scenario or res / "scenario.json")
    out = args.out or res
    out.mkdir(parents=True, exist_ok=True)

    plot_metric_bars(M.batch_evaluate(records), out / "metrics.svg")
    path_id = args.path_id or records[0].path_id
    try:
        path = sc.path(path_id)
    except KeyError:
        raise ConfigError(f"unknown path id {path_id!r}") from None
    corridor = sc.corridor(path)
    runs = {ap: simulate_trial(sc, path, ap, args.trial, replace(cfg, jobs=1), corridor) for ap in cfg.approaches}
    fig = out / f"trajectory_{path.id}_trial{args.trial}.svg"
    plot_trajectories(sc, path, corridor, runs, fig)
    print(f"wrote {out / 'metrics.svg'} and {fig}")
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "plot": cmd_plot}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScenarioError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except Exception as exc:  # noqa: BLE001 - last-resort exit status
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
