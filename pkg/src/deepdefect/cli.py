"""Command line entry point: ``deepdefect run | metrics | rank``.

Failures print a single ``error: <Kind>: <message>`` line on stderr and exit
with status 1.
"""

import argparse
import csv
import sys
from pathlib import Path

from .data import _label_value
from .evaluation import METRIC_NAMES, confusion, metrics, weighted_rank
from .experiment import POSITIVE_CLASSES, emit_report, resolve_config, run_experiment


def _read_labels(path):
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    return [_label_value(ln) for ln in lines if ln]


def _positive(tag):
    tag = tag.strip().lower()
    if tag in POSITIVE_CLASSES:
        return POSITIVE_CLASSES[tag]
    return _label_value(tag)


def cmd_run(args):
    overrides = {"dataset": args.dataset, "model": args.model, "layers": args.layers,
                 "folds": args.folds, "seed": args.seed, "out": args.out}
    if args.leak_free_norm:
        overrides["leak_free_normalization"] = True
    config = resolve_config(args.config, overrides)
    bundle = run_experiment(config)
    out = config.output_dir or "results"
    emit_report(bundle, out)
    s = bundle.summary
    print(f"{config.dataset_name} {config.model}: accuracy {100 * s.mean['accuracy']:.2f} "
          f"+- {100 * s.std['accuracy']:.2f} over {config.folds} folds -> {out}")


def cmd_metrics(args):
    predicted = _read_labels(args.predictions)
    actual = _read_labels(args.labels)
    cm = confusion(predicted, actual, _positive(args.positive_class))
    report = metrics(cm)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["metric", "value"])
    for name in ("tp", "fp", "fn", "tn"):
        w.writerow([name, getattr(cm, name)])
    for name in METRIC_NAMES:
        v = getattr(report, name)
        w.writerow([name, "NA" if v is None else repr(v)])


def _to_float(cell):
    try:
        return float(cell)
    except (TypeError, ValueError):
        return None


def read_accuracy_table(path):
    """Read a long (dataset, method, accuracy) or wide (method x datasets) CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path} has no rows")
    cols = rows[0].keys()
    table = {}
    if {"dataset", "method", "accuracy"} <= set(cols):
        for r in rows:
            table.setdefault(r["method"], {})[r["dataset"]] = _to_float(r["accuracy"])
    else:
        first = next(iter(cols))
        for r in rows:
            table[r[first]] = {c: _to_float(r[c]) for c in cols if c != first}
    return table


def cmd_rank(args):
    ranked = weighted_rank(read_accuracy_table(args.table))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["rank", "method", "score"])
    for method, score, rank in ranked:
        w.writerow([f"{rank:g}", method, f"{score:.4f}"])


def build_parser():
    p = argparse.ArgumentParser(prog="deepdefect", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="cross-validate a DBN or SSAE on one dataset")
    r.add_argument("--config", help="JSON config file")
    r.add_argument("--dataset", help="dataset path (overrides the config)")
    r.add_argument("--model", choices=("dbn", "ssae"))
    r.add_argument("--layers", help="hidden layer sizes, e.g. 30,12")
    r.add_argument("--folds", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--leak-free-norm", action="store_true",
                   help="fit the z-score on each training fold only")
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("metrics", help="metrics from label files (one label per line)")
    m.add_argument("--predictions", required=True)
    m.add_argument("--labels", required=True)
    m.add_argument("--positive-class", default="non-defective")
    m.set_defaults(func=cmd_metrics)

    k = sub.add_parser("rank", help="weighted rank of methods over a comparison table")
    k.add_argument("--table", required=True)
    k.set_defaults(func=cmd_rank)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - one-line report for every failure
        msg = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    return 0
