"""
A batch experiment from a config file
=====================================

The same thing the ``invlearn run`` and ``invlearn analyze`` commands do,
from Python: load the shipped config, run a few seeds, read the summary.
"""
import json

from invlearn.experiment import analyze_run, parse_config, run_experiment_batch
from invlearn.experiment.io import read_table

cfg = parse_config("example1").with_overrides(seeds=[0, 1, 2], stages=300, output="demo_output/batch")
print(json.dumps(cfg.resolved()["run"], indent=1))

summary = run_experiment_batch(cfg)
for row in read_table(summary.output / "summary.csv"):
    print(row["seed"], row["status"], "tail y:", row["y1_tail"][:5], row["y2_tail"][:5],
          "tail MAP:", row["map1_tail"][:5], row["map2_tail"][:5])

report = analyze_run(summary.output)
print("contraction converged:", report["contraction"]["converged"])
print("profile argmax per seed:",
      {s: (r["profile1_argmax"], r["profile2_argmax"]) for s, r in report["runs"].items()})
