"""
A small seeded batch over all built-in paths, summarised like the result tables.

Uses 20 trials per path to stay quick; the command line ``secnav run``
does the same at full scale.
"""
import time

from secnav.experiment import ExperimentConfig, reliability, run_experiment, summary_table
from secnav.metrics import batch_evaluate
from secnav.scenario import builtin_scenario


def main():
    sc = builtin_scenario(0)
    t0 = time.perf_counter()
    records = run_experiment(sc, ExperimentConfig(trials=20, seed=0))
    print(f"{len(records)} runs in {time.perf_counter() - t0:.1f} s\n")
    print(summary_table(batch_evaluate(records)))
    for ap, v in reliability(records).items():
        print(f"{ap:18s} reached goal {v['reached_goal']}/{v['runs']}, violations {v['safety_violations']}")


if __name__ == "__main__":
    main()
