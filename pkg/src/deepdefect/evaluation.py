"""Confusion matrices, the five reported metrics, fold aggregation and ranking.

The positive class defaults to the NON-defective (majority) class.  Under
that convention a recall of 0.97 on CM1 together with LR+ = 1.22 implies a
specificity near 0.2, which is what the published metric table shows; with
the defective minority as positive those numbers are not jointly possible.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .data import NON_DEFECTIVE

METRIC_NAMES = ("accuracy", "precision", "recall", "lr_plus", "lr_minus")


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other):
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class MetricsReport:
    """Metric values; ``None`` marks a metric whose denominator was zero."""

    accuracy: float | None
    precision: float | None
    recall: float | None
    lr_plus: float | None
    lr_minus: float | None
    specificity: float | None = None

    def as_dict(self):
        return {name: getattr(self, name) for name in METRIC_NAMES}


def confusion(predicted, actual, positive_class=NON_DEFECTIVE):
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape or predicted.ndim != 1:
        raise ValueError(f"predicted {predicted.shape} and actual {actual.shape} must be equal-length vectors")
    if predicted.size == 0:
        raise ValueError("no labels to compare")
    if positive_class not in (0, 1):
        raise ValueError("positive_class must be 0 or 1")
    for arr in (predicted, actual):
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
    pred_pos = predicted == positive_class
    act_pos = actual == positive_class
    return ConfusionMatrix(int(np.sum(pred_pos & act_pos)), int(np.sum(pred_pos & ~act_pos)),
                           int(np.sum(~pred_pos & act_pos)), int(np.sum(~pred_pos & ~act_pos)))


def _ratio(num, den):
    return num / den if den else None


def metrics(cm):
    if cm.total < 1:
        raise ValueError("empty confusion matrix")
    sens = _ratio(cm.tp, cm.tp + cm.fn)
    spec = _ratio(cm.tn, cm.tn + cm.fp)
    lr_plus = lr_minus = None
    if sens is not None and spec is not None:
        lr_plus = _ratio(sens, 1.0 - spec)
        lr_minus = _ratio(1.0 - sens, spec)
    return MetricsReport(accuracy=(cm.tp + cm.tn) / cm.total,
                         precision=_ratio(cm.tp, cm.tp + cm.fp),
                         recall=sens, lr_plus=lr_plus, lr_minus=lr_minus, specificity=spec)


@dataclass
class CvSummary:
    per_fold: list
    mean: dict
    std: dict
    undefined: dict
    confusions: list = field(default_factory=list)
    predictions: np.ndarray | None = None
    fold_of: np.ndarray | None = None


def summarize(reports, confusions=(), predictions=None, fold_of=None):
    """Mean and population std of every metric, skipping undefined fold values."""
    mean, std, undefined = {}, {}, {}
    for name in METRIC_NAMES:
        values = [getattr(r, name) for r in reports]
        defined = [v for v in values if v is not None]
        undefined[name] = len(values) - len(defined)
        mean[name] = float(np.mean(defined)) if defined else None
        std[name] = float(np.std(defined)) if defined else None
    return CvSummary(list(reports), mean, std, undefined, list(confusions), predictions, fold_of)


def cross_validate(model_builder, dataset, plan, positive_class=NON_DEFECTIVE):
    """Train and score one model per fold.

    ``model_builder(train_features, train_labels, fold_index)`` must return a
    callable mapping test features to hard 0/1 labels.
    """
    n = dataset.n_samples
    predictions = np.full(n, -1, dtype=np.int64)
    fold_of = np.full(n, -1, dtype=np.int64)
    reports, confusions = [], []
    for i, (train_idx, test_idx) in enumerate(plan.folds):
        if np.any(fold_of[test_idx] >= 0):
            raise ValueError("fold plan has overlapping test sets")
        predictor = model_builder(dataset.features[train_idx], dataset.labels[train_idx], i)
        pred = np.asarray(predictor(dataset.features[test_idx]), dtype=np.int64)
        predictions[test_idx] = pred
        fold_of[test_idx] = i
        cm = confusion(pred, dataset.labels[test_idx], positive_class)
        confusions.append(cm)
        reports.append(metrics(cm))
    if np.any(fold_of < 0):
        raise ValueError("fold plan does not cover every sample")
    return summarize(reports, confusions, predictions, fold_of)


def weighted_rank(table):
    """Rank methods across datasets by their mean per-dataset accuracy rank.

    ``table`` maps method -> {dataset: accuracy or None}.  Within a dataset
    the best accuracy gets rank 1 and ties share the mean rank.  Returns
    ``[(method, score, final_rank), ...]`` sorted best first; the final rank
    also shares ties.
    """
    methods = [m for m in table if any(v is not None for v in table[m].values())]
    for m in table:
        if m not in methods:
            warnings.warn(f"method {m!r} has no values and is left out of the ranking", stacklevel=2)
    if len(methods) < 2:
        raise ValueError("need at least two methods with values to rank")
    datasets = []
    for m in methods:
        datasets += [d for d in table[m] if d not in datasets]
    per_method = {m: [] for m in methods}
    for d in datasets:
        present = [m for m in methods if table[m].get(d) is not None]
        if not present:
            continue
        ranks = rankdata([-table[m][d] for m in present], method="average")
        for m, r in zip(present, ranks):
            per_method[m].append(float(r))
    scores = {m: float(np.mean(per_method[m])) for m in methods}
    order = sorted(methods, key=lambda m: (scores[m], methods.index(m)))
    final = rankdata([scores[m] for m in order], method="average")
    return [(m, scores[m], float(r)) for m, r in zip(order, final)]

