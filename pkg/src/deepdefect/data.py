"""Dataset loading (ARFF / CSV), z-score standardization and stratified folds.

Labels are stored as integers: ``1`` marks a defective module, ``0`` a clean
one.  Which of the two counts as the "positive" class for metrics is decided
in :mod:`deepdefect.evaluation`.
"""

import csv
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFECTIVE = 1
NON_DEFECTIVE = 0

_TRUE_TOKENS = {"true", "yes", "y", "t", "1", "defective", "buggy"}
_FALSE_TOKENS = {"false", "no", "n", "f", "0", "clean", "non-defective", "nondefective"}
_MISSING = {"?", ""}
_NUMERIC_TYPES = {"numeric", "real", "integer"}


class DatasetError(ValueError):
    """Base class for dataset loading problems."""


class ArffParseError(DatasetError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class CsvParseError(DatasetError):
    def __init__(self, row, column, message):
        super().__init__(f"row {row}, column {column!r}: {message}")
        self.row = row
        self.column = column


class EmptyDatasetError(DatasetError):
    pass


class UnsupportedLabelError(DatasetError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix plus binary defect labels."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    name: str = ""
    n_dropped: int = 0

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise EmptyDatasetError(f"dataset {self.name!r} has no samples or no features")
        if labels.shape != (features.shape[0],):
            raise ValueError("labels must be a vector with one entry per sample")
        if not np.all(np.isfinite(features)):
            raise ValueError("features contain non-finite values")
        if not np.isin(labels, (NON_DEFECTIVE, DEFECTIVE)).all():
            raise UnsupportedLabelError("labels must be 0 (clean) or 1 (defective)")
        if len(self.feature_names) != features.shape[1]:
            raise ValueError("feature_names length does not match the feature count")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    @property
    def defective_rate(self):
        return float(self.labels.mean())

    def subset(self, indices):
        return Dataset(self.features[indices], self.labels[indices],
                       self.feature_names, self.name)


def _label_value(token, defective_label=None):
    t = token.strip().strip("'\"")
    if defective_label is not None:
        return DEFECTIVE if t == defective_label else NON_DEFECTIVE
    low = t.lower()
    if low in _TRUE_TOKENS:
        return DEFECTIVE
    if low in _FALSE_TOKENS:
        return NON_DEFECTIVE
    # defect counts: any positive count marks the module defective
    try:
        return DEFECTIVE if float(t) > 0 else NON_DEFECTIVE
    except ValueError:
        raise UnsupportedLabelError(
            f"cannot tell whether class value {t!r} means defective; "
            "pass defective_label explicitly") from None


def _assemble(rows, labels, names, name, missing, n_raw):
    """Apply the missing-value policy and build the Dataset."""
    if missing not in ("drop", "mean"):
        raise ValueError("missing must be 'drop' or 'mean'")
    X = np.array(rows, dtype=np.float64).reshape(len(rows), len(names))
    y = np.array(labels, dtype=object)
    keep = np.array([lab is not None for lab in labels], dtype=bool)
    if missing == "drop":
        keep &= ~np.isnan(X).any(axis=1)
    X, y = X[keep], y[keep]
    if X.shape[0] == 0:
        raise EmptyDatasetError(f"dataset {name!r} has no rows left after dropping missing values")
    if missing == "mean":
        col_mean = np.nanmean(np.where(np.isnan(X).all(axis=0), 0.0, X), axis=0)
        X = np.where(np.isnan(X), col_mean, X)
    return Dataset(X, y.astype(np.int64), tuple(names), name, n_dropped=n_raw - X.shape[0])


_ATTR_RE = re.compile(r"""^@attribute\s+('(?:[^']*)'|"(?:[^"]*)"|\S+)\s+(.+)$""", re.IGNORECASE)


def _unquote(s):
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1]
    return s


def load_arff(path, missing="drop", defective_label=None, name=None):
    """Read a NASA-style ARFF file.

    All attributes except the last must be numeric; the last one is the
    nominal class.  Rows with a ``?`` are dropped (``missing="drop"``) or
    filled with the column mean (``missing="mean"``); the number of dropped
    rows is kept in ``Dataset.n_dropped``.
    """
    path = Path(path)
    relation = None
    attributes = []  # (name, kind, values)
    rows, labels = [], []
    in_data = False
    lineno = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if not in_data:
                low = line.lower()
                if low.startswith("@relation"):
                    parts = line.split(None, 1)
                    if len(parts) != 2:
                        raise ArffParseError(lineno, "@relation needs a name")
                    relation = _unquote(parts[1])
                elif low.startswith("@attribute"):
                    m = _ATTR_RE.match(line)
                    if m is None:
                        raise ArffParseError(lineno, f"malformed attribute declaration {line!r}")
                    attr, kind = _unquote(m.group(1)), m.group(2).strip()
                    if kind.lower() in _NUMERIC_TYPES:
                        attributes.append((attr, "numeric", None))
                    elif kind.startswith("{") and kind.endswith("}"):
                        values = [_unquote(v) for v in kind[1:-1].split(",") if v.strip()]
                        attributes.append((attr, "nominal", values))
                    else:
                        raise ArffParseError(lineno, f"unsupported attribute type {kind!r}")
                elif low.startswith("@data"):
                    if relation is None:
                        raise ArffParseError(lineno, "@data before @relation")
                    nominal = [i for i, a in enumerate(attributes) if a[1] == "nominal"]
                    if len(nominal) != 1 or nominal[0] != len(attributes) - 1:
                        raise ArffParseError(
                            lineno, "expected exactly one nominal class attribute, declared last")
                    if len(attributes) < 2:
                        raise ArffParseError(lineno, "no numeric attributes declared")
                    class_values = attributes[-1][2]
                    if len(class_values) > 2:
                        raise UnsupportedLabelError(
                            f"class attribute has {len(class_values)} values {class_values}; "
                            "only binary labels are supported")
                    value_map = {v: _label_value(v, defective_label) for v in class_values}
                    in_data = True
                else:
                    raise ArffParseError(lineno, f"unexpected header line {line!r}")
                continue

            fields = [f.strip() for f in line.split(",")]
            if len(fields) != len(attributes):
                raise ArffParseError(
                    lineno, f"expected {len(attributes)} values, found {len(fields)}")
            values = []
            for token in fields[:-1]:
                if token in _MISSING:
                    values.append(np.nan)
                    continue
                try:
                    values.append(float(token))
                except ValueError:
                    raise ArffParseError(lineno, f"non-numeric value {token!r}") from None
            cls = _unquote(fields[-1])
            if cls in _MISSING:
                labels.append(None)
            elif cls in value_map:
                labels.append(value_map[cls])
            else:
                raise ArffParseError(lineno, f"class value {cls!r} not declared in the header")
            rows.append(values)

    if not in_data:
        raise ArffParseError(lineno, "missing @data section")
    if not rows:
        raise EmptyDatasetError(f"{path} has no data rows")
    names = [a[0] for a in attributes[:-1]]
    return _assemble(rows, labels, names, name or relation, missing, len(rows))


def load_csv(path, label_column, missing="drop", defective_label=None, name=None):
    """Read a comma-separated table with a header row.

    ``label_column`` is removed from the features and mapped to 0/1 labels.
    Empty cells and ``?`` count as missing.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDatasetError(f"{path} is empty") from None
        if label_column not in header:
            raise DatasetError(f"label column {label_column!r} not found in {path}")
        label_idx = header.index(label_column)
        names = [h for i, h in enumerate(header) if i != label_idx]
        if not names:
            raise DatasetError(f"{path} has no feature columns")
        rows, labels = [], []
        for rowno, record in enumerate(reader, start=2):
            if not any(cell.strip() for cell in record):
                continue
            if len(record) != len(header):
                raise CsvParseError(rowno, None, f"expected {len(header)} cells, found {len(record)}")
            values = []
            for i, cell in enumerate(record):
                cell = cell.strip()
                if i == label_idx:
                    continue
                if cell in _MISSING:
                    values.append(np.nan)
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise CsvParseError(rowno, header[i], f"non-numeric value {cell!r}") from None
            cls = record[label_idx].strip()
            labels.append(None if cls in _MISSING else _label_value(cls, defective_label))
            rows.append(values)
    if not rows:
        raise EmptyDatasetError(f"{path} has no data rows")
    present = {lab for lab in labels if lab is not None}
    if len(present) > 2:
        raise UnsupportedLabelError("more than two label values")
    return _assemble(rows, labels, names, name or path.stem, missing, len(rows))


def load_dataset(path, fmt=None, label_column=None, **kwargs):
    """Dispatch on ``fmt`` (``"arff"``/``"csv"``) or on the file suffix."""
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    if fmt == "arff":
        return load_arff(path, **kwargs)
    if fmt == "csv":
        if label_column is None:
            raise DatasetError("label_column is required for CSV input")
        return load_csv(path, label_column, **kwargs)
    raise DatasetError(f"unknown dataset format {fmt!r}")


@dataclass(frozen=True, eq=False)
class NormalizationParams:
    mu: np.ndarray
    sigma: np.ndarray


def zscore_fit(features):
    """Per-column mean and population standard deviation."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise ValueError("expected a non-empty 2-D matrix")
    if not np.all(np.isfinite(X)):
        raise ValueError("features contain non-finite values")
    sigma = X.std(axis=0)
    # a constant column can still pick up rounding noise in std()
    sigma[X.max(axis=0) == X.min(axis=0)] = 0.0
    return NormalizationParams(X.mean(axis=0), sigma)


def zscore_apply(features, params):
    """Standardize columns; zero-variance columns become all zeros."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != params.mu.shape[0]:
        raise ValueError(
            f"matrix has {X.shape[-1]} columns, normalization expects {params.mu.shape[0]}")
    constant = params.sigma == 0
    out = (X - params.mu) / np.where(constant, 1.0, params.sigma)
    out[:, constant] = 0.0
    return out


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple  # ((train_idx, test_idx), ...)
    k: int
    seed: int

    def __iter__(self):
        return iter(self.folds)

    def __len__(self):
        return len(self.folds)


def stratified_kfold(dataset, k=10, seed=0):
    """Split sample indices into ``k`` class-stratified folds.

    Each class is shuffled with ``seed`` and dealt round-robin into the
    folds, continuing where the previous class stopped, so per-class and
    total fold sizes both differ by at most one.
    """
    labels = dataset.labels if isinstance(dataset, Dataset) else np.asarray(dataset)
    n = labels.shape[0]
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of samples ({n})")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    offset = 0
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            warnings.warn(
                f"class {cls} has only {members.size} samples for {k} folds; "
                "some test folds will contain none of it", stacklevel=2)
        members = rng.permutation(members)
        fold_of[members] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    all_idx = np.arange(n)
    folds = tuple((all_idx[fold_of != f], all_idx[fold_of == f]) for f in range(k))
    return FoldPlan(folds, k, seed)
