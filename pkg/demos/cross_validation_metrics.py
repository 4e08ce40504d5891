"""
Cross-validation and the five metrics
=====================================

Any callable can be scored with ``cross_validate``; here a one-feature
threshold rule stands in for a trained network.  The last part ranks the
published accuracy table.
"""

import numpy as np

from deepdefect import ConfusionMatrix, cross_validate, load_arff, metrics, stratified_kfold, weighted_rank
from deepdefect.reference import accuracy_means

ds = load_arff("data/nasa/PC1.arff")
plan = stratified_kfold(ds, k=10, seed=0)
loc = ds.feature_names.index("loc") if "loc" in ds.feature_names else 0


def threshold_rule(X_train, y_train, fold):
    # flag the largest modules: threshold at the training-set 90th percentile
    cut = np.percentile(X_train[:, loc], 90)
    return lambda X_test: (X_test[:, loc] > cut).astype(int)


summary = cross_validate(threshold_rule, ds, plan)
for name, value in summary.mean.items():
    std = summary.std[name]
    print(f"{name:9s} {'NA' if value is None else f'{value:.4f} +- {std:.4f}'}")
print(f"folds with undefined LR-: {summary.undefined['lr_minus']}")

# The positive class is the non-defective majority, so recall is the share
# of clean modules recognised as clean.
print(metrics(ConfusionMatrix(tp=443, fp=38, fn=14, tn=10)))

print("\nweighted rank over the published accuracy table:")
for method, score, rank in weighted_rank(accuracy_means()):
    print(f"  {rank:>4g}  {method:10s} {score:.3f}")
