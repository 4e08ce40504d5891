"""Config-driven experiment runner: data -> model -> cross-validation -> report files.

A config file is a JSON object.  Recognised keys (all optional except the
dataset path)::

    dataset                  path to an .arff or .csv file
    dataset_name             key into the per-dataset layer table (default: file stem)
    format                   "arff" | "csv" (default: file suffix)
    label_column             CSV only
    missing                  "drop" | "mean"
    model                    "dbn" | "ssae"
    hidden_sizes             list of ints (default: per-dataset table)
    pretrain                 {"epochs", "batch_size", "learning_rate"}
    fine_tune                {"epochs", "batch_size", "learning_rate"}
    sparsity                 {"rho", "beta"}              (ssae only)
    folds, seed
    positive_class           "non-defective" | "defective"
    leak_free_normalization  bool
    output_dir

Precedence is command-line override > file value > built-in default.
"""

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .data import DEFECTIVE, NON_DEFECTIVE, load_dataset, stratified_kfold, zscore_apply, zscore_fit
from .dbn import FineTuneConfig, check_layer_spec, fine_tune, greedy_pretrain, predict, unroll_to_classifier
from .evaluation import METRIC_NAMES, cross_validate
from .rbm import RbmTrainConfig
from .reference import ACCURACY_TABLE, ARCHITECTURES, DATASET_STATS, DATASETS, HYPERPARAMETERS, METHODS
from .sae import SaeTrainConfig, SparsityConfig, greedy_stack_sae, unroll_encoders

MANIFEST_VERSION = 1
POSITIVE_CLASSES = {"non-defective": NON_DEFECTIVE, "defective": DEFECTIVE}

_TOP_KEYS = {"dataset", "dataset_name", "format", "label_column", "missing", "model", "hidden_sizes",
             "pretrain", "fine_tune", "sparsity", "folds", "seed", "positive_class",
             "leak_free_normalization", "output_dir"}
_TRAIN_KEYS = {"epochs", "batch_size", "learning_rate"}


class ConfigError(ValueError):
    pass


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainSettings:
    epochs: int
    batch_size: int
    learning_rate: float


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_path: str
    dataset_name: str
    model: str
    hidden_sizes: tuple
    pretrain: TrainSettings
    fine_tune: TrainSettings
    sparsity: SparsityConfig | None = None
    dataset_format: str = "arff"
    label_column: str | None = None
    missing: str = "drop"
    folds: int = 10
    seed: int = 0
    positive_class: str = "non-defective"
    leak_free_normalization: bool = False
    output_dir: str | None = None

    def to_dict(self):
        """The config in the JSON file schema, fully resolved."""
        return {
            "dataset": self.dataset_path, "dataset_name": self.dataset_name,
            "format": self.dataset_format, "label_column": self.label_column,
            "missing": self.missing, "model": self.model, "hidden_sizes": list(self.hidden_sizes),
            "pretrain": asdict(self.pretrain), "fine_tune": asdict(self.fine_tune),
            "sparsity": asdict(self.sparsity) if self.sparsity else None,
            "folds": self.folds, "seed": self.seed, "positive_class": self.positive_class,
            "leak_free_normalization": self.leak_free_normalization, "output_dir": self.output_dir,
        }

    def pretrain_config(self, seed):
        p = self.pretrain
        cls = RbmTrainConfig if self.model == "dbn" else SaeTrainConfig
        return cls(p.epochs, p.batch_size, p.learning_rate, seed)

    def fine_tune_config(self, seed):
        f = self.fine_tune
        return FineTuneConfig(f.epochs, f.batch_size, f.learning_rate, seed)


def _train_settings(given, defaults, where):
    given = given or {}
    unknown = set(given) - _TRAIN_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    merged = {**defaults, **given}
    try:
        s = TrainSettings(int(merged["epochs"]), int(merged["batch_size"]), float(merged["learning_rate"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {where} settings: {exc}") from None
    if s.epochs < 0 or s.batch_size < 1 or s.learning_rate < 0:
        raise ConfigError(f"invalid {where} settings {s}")
    return s


def _parse_layers(value):
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        return check_layer_spec(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def resolve_config(file=None, overrides=None):
    """Merge a config file (path or dict), overrides and defaults into an ExperimentConfig.

    Override keys use the file schema names; ``layers`` and ``out`` are
    accepted as aliases of ``hidden_sizes`` and ``output_dir``.
    """
    if file is None:
        raw = {}
    elif isinstance(file, dict):
        raw = dict(file)
    else:
        try:
            raw = json.loads(Path(file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {file}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    aliases = {"layers": "hidden_sizes", "out": "output_dir"}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        key = aliases.get(key, key)
        if key not in _TOP_KEYS:
            raise ConfigError(f"unknown override {key!r}")
        raw[key] = value

    if not raw.get("dataset"):
        raise ConfigError("no dataset path given")
    path = str(raw["dataset"])
    fmt = (raw.get("format") or Path(path).suffix.lstrip(".")).lower()
    if fmt not in ("arff", "csv"):
        raise ConfigError(f"format must be 'arff' or 'csv', got {fmt!r}")
    if fmt == "csv" and not raw.get("label_column"):
        raise ConfigError("label_column is required for CSV datasets")
    model = str(raw.get("model", "ssae")).lower()
    if model not in ("dbn", "ssae"):
        raise ConfigError(f"model must be 'dbn' or 'ssae', got {model!r}")
    name = str(raw.get("dataset_name") or Path(path).stem).upper()

    if raw.get("hidden_sizes") is not None:
        hidden = _parse_layers(raw["hidden_sizes"])
    elif name in ARCHITECTURES:
        hidden = ARCHITECTURES[name][model]
    else:
        raise ConfigError(
            f"no hidden_sizes given and {name!r} is not a known dataset; "
            f"known names: {', '.join(DATASETS)}")

    table = HYPERPARAMETERS[model]
    # the pretraining learning rate for autoencoders is not published; reuse the fine-tune rate
    pre_lr = table.get("pretrain_learning_rate", table["fine_tune_learning_rate"])
    pretrain = _train_settings(raw.get("pretrain"), {"epochs": table["pretrain_epochs"],
                               "batch_size": table["batch_size"], "learning_rate": pre_lr}, "pretrain")
    tune = _train_settings(raw.get("fine_tune"), {"epochs": table["epochs"],
                           "batch_size": table["batch_size"],
                           "learning_rate": table["fine_tune_learning_rate"]}, "fine_tune")
    sparsity = None
    if model == "ssae":
        given = raw.get("sparsity") or {}
        if set(given) - {"rho", "beta"}:
            raise ConfigError(f"unknown sparsity keys: {sorted(set(given) - {'rho', 'beta'})}")
        try:
            sparsity = SparsityConfig(float(given.get("rho", table["rho"])), float(given.get("beta", 3.0)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    positive = str(raw.get("positive_class", "non-defective")).lower()
    if positive not in POSITIVE_CLASSES:
        raise ConfigError(f"positive_class must be one of {sorted(POSITIVE_CLASSES)}")
    missing = str(raw.get("missing", "drop"))
    if missing not in ("drop", "mean"):
        raise ConfigError("missing must be 'drop' or 'mean'")
    folds = int(raw.get("folds", 10))
    if folds < 2:
        raise ConfigError("folds must be at least 2")
    return ExperimentConfig(
        dataset_path=path, dataset_name=name, model=model, hidden_sizes=tuple(hidden),
        pretrain=pretrain, fine_tune=tune, sparsity=sparsity, dataset_format=fmt,
        label_column=raw.get("label_column"), missing=missing, folds=folds,
        seed=int(raw.get("seed", 0)), positive_class=positive,
        leak_free_normalization=bool(raw.get("leak_free_normalization", False)),
        output_dir=raw.get("output_dir"))


@dataclass
class ResultsBundle:
    config: ExperimentConfig
    dataset_sha256: str
    n_samples: int
    n_dropped: int
    summary: object
    curves: list
    mean_curve: np.ndarray
    durations: dict = field(default_factory=dict)


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _fit_fold(config, X, y, fold):
    """Pretrain, unroll and fine-tune one model; returns (classifier, error curve)."""
    seed = config.seed + fold
    if config.model == "dbn":
        stack = greedy_pretrain(X, config.hidden_sizes, config.pretrain_config(seed))
        clf = unroll_to_classifier(stack, 2, seed)
    else:
        stack = greedy_stack_sae(X, config.hidden_sizes, config.sparsity, config.pretrain_config(seed))
        clf = unroll_encoders(stack, 2, seed)
    return fine_tune(clf, X, y, config.fine_tune_config(seed))


def run_experiment(config, dataset=None):
    """Normalize, split, train one model per fold and collect metrics and curves.

    ``dataset`` may be passed pre-loaded; otherwise ``config.dataset_path``
    is read.  On failure a manifest recording the failing stage is written
    to ``config.output_dir`` (when set) and :class:`ExperimentError` raised.
    """
    stage = {"stage": "load", "fold": None}
    started = time.perf_counter()
    durations = {"folds": []}
    try:
        if dataset is None:
            dataset = load_dataset(config.dataset_path, config.dataset_format,
                                   config.label_column, missing=config.missing)
        checksum = file_sha256(config.dataset_path)

        stage["stage"] = "normalize"
        if not config.leak_free_normalization:
            data = replace(dataset, features=zscore_apply(dataset.features, zscore_fit(dataset.features)))
        else:
            data = dataset

        stage["stage"] = "split"
        plan = stratified_kfold(data, config.folds, config.seed)
        curves = [None] * config.folds

        def build(X, y, fold):
            stage.update(stage="train", fold=fold)
            t0 = time.perf_counter()
            norm = zscore_fit(X) if config.leak_free_normalization else None
            if norm is not None:
                X = zscore_apply(X, norm)
            clf, curves[fold] = _fit_fold(config, X, y, fold)
            durations["folds"].append(time.perf_counter() - t0)

            def predictor(X_test):
                if norm is not None:
                    X_test = zscore_apply(X_test, norm)
                return predict(clf, X_test)[1]
            return predictor

        summary = cross_validate(build, data, plan, POSITIVE_CLASSES[config.positive_class])
    except Exception as exc:
        if config.output_dir:
            _write_failure_manifest(config, stage, exc)
        raise ExperimentError(f"{stage['stage']} failed"
                              + (f" in fold {stage['fold']}" if stage["fold"] is not None else "")
                              + f": {type(exc).__name__}: {exc}") from exc
    durations["total"] = time.perf_counter() - started
    mean_curve = np.mean(np.vstack(curves), axis=0) if config.fine_tune.epochs else np.empty(0)
    return ResultsBundle(config, checksum, dataset.n_samples, dataset.n_dropped,
                         summary, curves, mean_curve, durations)


def _manifest(config, extra):
    return {"manifest_version": MANIFEST_VERSION, "tool": "deepdefect", "tool_version": __version__,
            "config": config.to_dict(), "seed": config.seed, "checksum_algorithm": "sha256", **extra}


def _write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_failure_manifest(config, stage, exc):
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "manifest.json", _manifest(config, {
        "status": "failed", "failed_stage": stage["stage"], "failed_fold": stage["fold"],
        "error": f"{type(exc).__name__}: {exc}"}))


def _pct(v):
    return "NA" if v is None else f"{100.0 * v:.2f}"


def _ratio(v):
    return "NA" if v is None else f"{v:.4f}"


def _metric_cells(values):
    return [_pct(values["accuracy"]), _pct(values["precision"]), _pct(values["recall"]),
            _ratio(values["lr_plus"]), _ratio(values["lr_minus"])]


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit_report(bundle, output_dir=None, reference=ACCURACY_TABLE):
    """Write metrics.csv, the curve files, comparison.csv and manifest.json.

    Accuracy, precision and recall are written as percentages with two
    decimals; likelihood ratios with four.  Returns the written paths.
    """
    cfg = bundle.config
    out = Path(output_dir or cfg.output_dir or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    s = bundle.summary

    rows = []
    for i, (rep, cm) in enumerate(zip(s.per_fold, s.confusions)):
        rows.append([str(i)] + _metric_cells(rep.as_dict()) + [cm.tp, cm.fp, cm.fn, cm.tn])
    rows.append(["mean"] + _metric_cells(s.mean) + ["", "", "", ""])
    rows.append(["std"] + _metric_cells(s.std) + ["", "", "", ""])
    header = ["fold", *METRIC_NAMES, "tp", "fp", "fn", "tn"]
    _write_csv(out / "metrics.csv", header, rows)
    written.append(out / "metrics.csv")

    for i, curve in enumerate(bundle.curves):
        p = out / f"curve_fold{i}.csv"
        _write_csv(p, ["epoch", "error"], [[e + 1, repr(float(v))] for e, v in enumerate(curve)])
        written.append(p)
    p = out / "curve_mean.csv"
    _write_csv(p, ["epoch", "error"], [[e + 1, repr(float(v))] for e, v in enumerate(bundle.mean_curve)])
    written.append(p)

    name = cfg.dataset_name
    expected = DATASET_STATS.get(name, (None, None))[0]
    matches = "" if expected is None else ("yes" if expected == bundle.n_samples else "no")
    common = [bundle.n_samples, "" if expected is None else expected, matches]
    acc_mean, acc_std = s.mean["accuracy"], s.std["accuracy"]
    comp = [[name, f"{cfg.model.upper()} (this run)", "this run", _pct(acc_mean), _pct(acc_std), *common]]
    for method in METHODS:
        cell = reference.get(method, {}).get(name)
        if cell is not None:
            mean, std = cell
            comp.append([name, method, "Table 5", f"{mean:.2f}",
                         "" if std is None else f"{std:.2f}", *common])
    _write_csv(out / "comparison.csv",
               ["dataset", "method", "source", "accuracy", "std",
                "n_samples_loaded", "n_samples_reference", "sample_count_matches"], comp)
    written.append(out / "comparison.csv")

    _write_json(out / "manifest.json", _manifest(cfg, {
        "status": "ok",
        "dataset": {"path": cfg.dataset_path, "name": name, "sha256": bundle.dataset_sha256,
                    "n_samples": bundle.n_samples, "n_dropped": bundle.n_dropped},
        "undefined_fold_metrics": s.undefined,
        "durations_seconds": bundle.durations,
    }))
    written.append(out / "manifest.json")
    return written


def load_manifest_config(path):
    """Re-resolve the config echoed in a manifest file."""
    manifest = json.loads(Path(path).read_text(encoding="utf-8"))
    return resolve_config(manifest["config"])
