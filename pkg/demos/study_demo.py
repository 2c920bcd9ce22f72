"""Benchmark study runner: multiple seeds, CSV artifacts, EF/AF metrics.

Runs a compact Rosenbrock study (1 categorical + 3 continuous) over 3 seeds
and prints the metrics table; the CSV artifacts land in study_demo_out/.
"""

from catbox import StudyConfig
from catbox.studies import run_study

study = StudyConfig.from_json(
    {
        "function": "rosenbrock",
        "n_cat": 1,
        "levels_per_cat": 5,
        "n_con": 3,
        "methods": ["catbox", "random"],
        "seeds": [0, 1, 2],
        "n_init": 15,
        "iters": 30,
    }
)

metrics = run_study(study, "study_demo_out")
print(f"threshold theta = {metrics.theta:.4f} ({metrics.metadata['ef_af_definition']})")
for name, m in sorted(metrics.per_method.items()):
    print(
        f"{name:8s} mean final {m.mean_final:10.2f} +- {m.std_final:8.2f}"
        f"   EF {m.ef:7.3f}   AF {m.af:5.2f}   iters-to-theta {m.mean_iters_to_threshold:5.1f}"
    )
print("artifacts: study_demo_out/ (per-run CSVs, aggregate.csv, decision paths, metrics.json)")
