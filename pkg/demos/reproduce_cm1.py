"""
Ten-fold reproduction on CM1
============================

Runs both models with the default hyperparameters and layer sizes and
writes the report files under ``results/``.  Takes about a minute.
"""

import csv

from deepdefect import emit_report, resolve_config, run_experiment

for model in ("dbn", "ssae"):
    config = resolve_config({"dataset": "data/nasa/CM1.arff", "model": model, "seed": 0,
                             "output_dir": f"results/CM1_{model}"})
    bundle = run_experiment(config)
    emit_report(bundle)
    s = bundle.summary
    print(f"{model.upper()} {config.hidden_sizes}: accuracy {100 * s.mean['accuracy']:.2f} "
          f"+- {100 * s.std['accuracy']:.2f}, recall {s.mean['recall']:.3f}")
    print(f"  fine-tune error, epoch 1 / 150: {bundle.mean_curve[0]:.4f} / {bundle.mean_curve[-1]:.4f}")

with open("results/CM1_ssae/comparison.csv", encoding="utf-8") as fh:
    for row in csv.DictReader(fh):
        print(f"  {row['method']:18s} {row['accuracy']:>6s} {row['std']}")
