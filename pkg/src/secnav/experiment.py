"""Seeded trial batches over a scenario, with CSV and summary-table output.

Trial ``i`` of every path and approach draws from ``base_seed + i``, so both
approaches face the same random stream on the same path (common random
numbers) and any single trial can be replayed from its row in the CSV.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import metrics as M
from .localization import LandmarkIndex, MeasurementNoise
from .motion import MotionParams, ProcessNoise
from .navigator import APPROACH_BMM, APPROACH_EKF, APPROACHES, NavConfig, NavigationOutcome, navigate
from .scenario import FIELD_NOISE, NoiseConfig, PathSpec, Scenario

CSV_COLUMNS = (
    "trial", "path_class", "path_id", "approach", "percent_error", "ade", "fde",
    "reached_goal", "safety_violations", "steps",
)
APPROACH_KEYS = {"1": (APPROACH_BMM,), "2": (APPROACH_EKF,), "both": APPROACHES}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a batch besides the scenario itself."""

    approaches: tuple[str, ...] = APPROACHES
    trials: int = 1000
    seed: int = 0
    motion: MotionParams = field(default_factory=MotionParams)
    noise: NoiseConfig | None = None
    nav: NavConfig = field(default_factory=NavConfig)
    path_ids: tuple[str, ...] | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        if not self.approaches:
            raise ValueError("no approach selected")
        for ap in self.approaches:
            if ap not in APPROACHES:
                raise ValueError(f"unknown approach {ap!r}")

    def noise_for(self, scenario: Scenario) -> NoiseConfig:
        """Explicit noise wins, then the scenario's own, then the built-in field profile."""
        return self.noise or scenario.noise or FIELD_NOISE

    def to_dict(self) -> dict:
        d = asdict(self)
        d["approaches"] = list(self.approaches)
        d["path_ids"] = None if self.path_ids is None else list(self.path_ids)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        noise = d.get("noise")
        if noise is not None:
            noise = NoiseConfig(ProcessNoise(**noise["process"]), MeasurementNoise(**noise["measurement"]))
        return cls(
            approaches=tuple(d["approaches"]),
            trials=int(d["trials"]),
            seed=int(d["seed"]),
            motion=MotionParams(**d["motion"]),
            noise=noise,
            nav=NavConfig(**d["nav"]),
            path_ids=None if d.get("path_ids") is None else tuple(d["path_ids"]),
            jobs=int(d.get("jobs", 1)),
        )


def selected_paths(scenario: Scenario, cfg: ExperimentConfig) -> list[PathSpec]:
    if cfg.path_ids is None:
        return list(scenario.paths)
    known = {p.id for p in scenario.paths}
    missing = [pid for pid in cfg.path_ids if pid not in known]
    if missing:
        raise ValueError(f"unknown path id(s): {', '.join(missing)}")
    return [p for p in scenario.paths if p.id in cfg.path_ids]


def trial_seed(cfg: ExperimentConfig, trial: int) -> int:
    return cfg.seed + trial


def score(outcome: NavigationOutcome) -> M.TrajectoryEval:
    """Metrics of the navigator's own track against where the entity really went."""
    t = np.asarray(outcome.times)
    return M.evaluate(outcome.estimated_xy(), outcome.true_xy(), t, t)


def simulate_trial(scenario: Scenario, path: PathSpec, approach: str, trial: int, cfg: ExperimentConfig,
                   corridor=None, index=None) -> NavigationOutcome:
    """Replay one trial exactly as a batch would run it."""
    noise = cfg.noise_for(scenario)
    return navigate(
        corridor if corridor is not None else scenario.corridor(path),
        approach,
        cfg.motion,
        noise.process,
        noise.measurement,
        index if index is not None else LandmarkIndex(scenario.map.landmarks),
        seed=trial_seed(cfg, trial),
        config=cfg.nav,
    )


def _run_block(args) -> list[M.TrialRecord]:
    scenario, path, approach, trials, cfg = args
    corridor = scenario.corridor(path)
    index = LandmarkIndex(scenario.map.landmarks)
    out = []
    for i in trials:
        o = simulate_trial(scenario, path, approach, i, cfg, corridor, index)
        ev = score(o)
        out.append(M.TrialRecord(
            path_class=path.path_class,
            path_id=path.id,
            approach=approach,
            percent_error=ev.percent_error,
            ade=ev.ade,
            fde=ev.fde,
            reached_goal=o.reached_goal,
            safety_violations=o.safety_violations,
            steps=o.steps,
            trial=i,
        ))
    return out


def run_experiment(scenario: Scenario, cfg: ExperimentConfig) -> list[M.TrialRecord]:
    """All trials of all selected paths and approaches, in a fixed order.

    Rows come back ordered by path, then approach, then trial, whatever the
    number of worker processes.
    """
    blocks = [(scenario, p, ap, range(cfg.trials), cfg) for p in selected_paths(scenario, cfg) for ap in cfg.approaches]
    if cfg.jobs == 1 or len(blocks) == 1:
        results = [_run_block(b) for b in blocks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_block, blocks))
    return [r for block in results for r in block]


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_cell(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_records(path) -> list[M.TrialRecord]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for i, row in enumerate(rows, start=2):
        try:
            out.append(M.TrialRecord(
                path_class=row["path_class"],
                path_id=row["path_id"],
                approach=row["approach"],
                percent_error=float(row["percent_error"]),
                ade=float(row["ade"]),
                fde=float(row["fde"]),
                reached_goal=row["reached_goal"] == "1",
                safety_violations=int(row["safety_violations"]),
                steps=int(row["steps"]),
                trial=int(row["trial"]),
            ))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{path}: bad row at line {i}: {exc}") from None
    return out


def _fmt(x: float) -> str:
    return f"{x:8.2f}" if math.isfinite(x) else f"{'-':>8}"


def summary_table(summary: M.BatchSummary) -> str:
    """Plain-text tables: percent error per class, then ADE/FDE per class.

    When both approaches are present, an improvement row follows each table.
    """
    cols = (*summary.classes, "average")
    head = f"{'':18}" + "".join(f"{c:>9}" for c in cols)
    both = set(APPROACHES) <= set(summary.approaches)
    order = [ap for ap in APPROACHES if ap in summary.approaches]
    lines = ["Average percent error (%)", head]
    for ap in order:
        lines.append(f"{ap:18}" + "".join(" " + _fmt(summary.means[ap][c]["percent_error"]) for c in cols))
    if both:
        imp = summary.improvements(APPROACH_BMM, APPROACH_EKF)
        lines.append(f"{'improvement (%)':18}" + "".join(" " + _fmt(imp[c]["percent_error"]) for c in cols))
    for metric, label in (("ade", "ADE (m)"), ("fde", "FDE (m)")):
        lines += ["", label, head]
        for ap in order:
            lines.append(f"{ap:18}" + "".join(" " + _fmt(summary.means[ap][c][metric]) for c in cols))
        if both:
            lines.append(f"{'improvement (%)':18}" + "".join(" " + _fmt(imp[c][metric]) for c in cols))
    lines += ["", "trials per approach and class"]
    for ap in order:
        lines.append(f"{ap:18}" + "".join(f"{summary.counts[ap].get(c, 0):>9}" for c in summary.classes))
    return "\n".join(lines) + "\n"


def reliability(records) -> dict:
    """Goal rate and violation totals per approach."""
    out = {}
    present = {r.approach for r in records}
    for ap in [a for a in APPROACHES if a in present]:
        rs = [r for r in records if r.approach == ap]
        out[ap] = {
            "runs": len(rs),
            "reached_goal": sum(r.reached_goal for r in rs),
            "safety_violations": sum(r.safety_violations for r in rs),
            "mean_steps": math.fsum(r.steps for r in rs) / len(rs),
        }
    return out


def write_results(out_dir, scenario_text: str, cfg: ExperimentConfig, records) -> dict[str, Path]:
    """Write the per-trial CSV, the summary, the config and a copy of the scenario."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out / "results.csv",
        "summary": out / "summary.txt",
        "config": out / "run_config.json",
        "scenario": out / "scenario.json",
    }
    paths["csv"].write_text(records_to_csv(records))
    text = summary_table(M.batch_evaluate(records))
    rel = reliability(records)
    text += "\nreliability\n" + "".join(
        f"{ap:18} goal {v['reached_goal']}/{v['runs']}, violations {v['safety_violations']}, "
        f"mean steps {v['mean_steps']:.1f}\n" for ap, v in rel.items()
    )
    paths["summary"].write_text(text)
    paths["config"].write_text(json.dumps(cfg.to_dict(), indent=1, sort_keys=True) + "\n")
    paths["scenario"].write_text(scenario_text)
    return paths


def with_margin(scenario: Scenario, margin: float) -> Scenario:
    """Same scenario with every path's corridor margin replaced."""
    return replace(scenario, paths=tuple(replace(p, margin=margin) for p in scenario.paths))
