#!/usr/bin/env python3
"""Run the full feedback experiment offline and print the text report.

Uses the shipped replay cassettes: one completion per (band, profile) cell,
nine in total, then the standard-solution-vs-feedback and pairwise tables per
band. Running it twice always yields the same report hash.
"""

from pathlib import Path

from aisensei.experiment_runner import (
    ExperimentConfig,
    render_report_text,
    report_hash,
    run_experiment,
)

DATA = Path(__file__).resolve().parent.parent / "data"

cfg = ExperimentConfig.from_file(DATA / "experiment.replay.json")
report = run_experiment(cfg)

print(render_report_text(report))
print(f"report hash: {report_hash(report)}")
print("(rerun this script: the hash will not change)")
