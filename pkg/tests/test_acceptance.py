"""Acceptance criteria 1-14.

Each test appends one ``CRITERION n: PASS|FAIL ...`` line to the session log,
which the terminal summary prints in criterion order.  Criteria 1-5 train
full ten-fold models with the published defaults and are marked
``reproduction``; datasets missing from the data directory fail their
criterion rather than being skipped.
"""

import itertools
import math
import warnings

import numpy as np
import pytest

from deepdefect._numeric import softmax
from deepdefect.data import stratified_kfold, zscore_apply, zscore_fit
from deepdefect.dbn import FeedforwardClassifier, loss_and_gradients, predict
from deepdefect.evaluation import ConfusionMatrix, confusion, metrics
from deepdefect.experiment import emit_report, resolve_config, run_experiment
from deepdefect.rbm import RbmParams, VisibleKind, cd1_update
from deepdefect.reference import ACCURACY_TABLE, DATASET_STATS, DATASETS
from deepdefect.sae import SparseAutoencoderParams, SparsityConfig, kl_sparsity, sae_loss_and_gradient

from conftest import dataset_path, write_smoke_arff
from test_rbm import FixedUniforms, cd1_oracle, uniforms_forcing

_RUNS = {}


def record(log, n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    log.append(line)
    print(line)
    assert ok, line


def reproduce(name, model, out_root):
    """Cached ten-fold run with the default settings for ``name``; None when the file is absent."""
    key = (name, model)
    if key not in _RUNS:
        path = dataset_path(name)
        if path is None:
            _RUNS[key] = None
        else:
            cfg = resolve_config({"dataset": str(path), "model": model, "seed": 0})
            bundle = run_experiment(cfg)
            emit_report(bundle, out_root / f"{name}_{model}")
            _RUNS[key] = bundle
    return _RUNS[key]


@pytest.fixture(scope="session")
def out_root(tmp_path_factory):
    return tmp_path_factory.mktemp("reproduction")


def accuracy_pct(bundle):
    return 100.0 * bundle.summary.mean["accuracy"]


def describe(name, bundle):
    s = bundle.summary
    ref_n = DATASET_STATS[name][0]
    share = 100 * np.mean(s.predictions == 0)
    return (f"{name}: {accuracy_pct(bundle):.2f} +- {100 * s.std['accuracy']:.2f} "
            f"(n={bundle.n_samples}, reference n={ref_n}, {share:.1f}% predicted non-defective)")


# quantitative reproduction ---------------------------------------------------

@pytest.mark.reproduction
def test_criterion_01_pc2_ssae(criteria_log, out_root):
    bundle = reproduce("PC2", "ssae", out_root)
    if bundle is None:
        record(criteria_log, 1, False, "PC2.arff is not available in the data directory; run not possible")
    acc = accuracy_pct(bundle)
    record(criteria_log, 1, acc >= 99.0, f"PC2 SSAE accuracy {acc:.2f} (need >= 99.0)")


@pytest.mark.reproduction
def test_criterion_02_mc1_ssae(criteria_log, out_root):
    bundle = reproduce("MC1", "ssae", out_root)
    if bundle is None:
        record(criteria_log, 2, False, "MC1.arff is not available in the data directory; run not possible")
    acc = accuracy_pct(bundle)
    record(criteria_log, 2, acc >= 98.5, f"MC1 SSAE accuracy {acc:.2f} (need >= 98.5)")


@pytest.mark.reproduction
def test_criterion_03_pc1_ssae(criteria_log, out_root):
    bundle = reproduce("PC1", "ssae", out_root)
    if bundle is None:
        record(criteria_log, 3, False, "PC1.arff is not available in the data directory")
    acc = accuracy_pct(bundle)
    record(criteria_log, 3, abs(acc - 94.13) <= 3.0, f"{describe('PC1', bundle)}; target 94.13 +- 3")


@pytest.mark.reproduction
def test_criterion_04_cm1_both_models(criteria_log, out_root):
    results = {m: reproduce("CM1", m, out_root) for m in ("dbn", "ssae")}
    if any(b is None for b in results.values()):
        record(criteria_log, 4, False, "CM1.arff is not available in the data directory")
    targets = {"dbn": 88.57, "ssae": 88.59}
    parts, ok = [], True
    for m, b in results.items():
        acc = accuracy_pct(b)
        ok &= abs(acc - targets[m]) <= 4.0
        parts.append(f"{m.upper()} {acc:.2f} vs {targets[m]}")
    record(criteria_log, 4, ok, "CM1 " + ", ".join(parts) + " (band +- 4)")


@pytest.mark.reproduction
def test_criterion_05_ssae_across_datasets(criteria_log, out_root):
    within, lines = 0, []
    for name in DATASETS:
        bundle = reproduce(name, "ssae", out_root)
        ref = ACCURACY_TABLE["SSAE"][name][0]
        if bundle is None:
            lines.append(f"{name}: missing")
            continue
        acc = accuracy_pct(bundle)
        hit = abs(acc - ref) <= 4.0
        within += hit
        lines.append(f"{name}: {acc:.2f} vs {ref} ({'in' if hit else 'out of'} band, "
                     f"n={bundle.n_samples}/{DATASET_STATS[name][0]})")
    print("\n".join(lines))
    record(criteria_log, 5, within >= 10,
           f"{within} of 14 SSAE accuracies within +- 4 (need 10); " + "; ".join(lines))


def test_criterion_06_likelihood_ratio_consistency(criteria_log, tmp_path):
    smoke = write_smoke_arff(tmp_path / "smoke.arff", n=40, seed=3)
    runs = [b for b in _RUNS.values() if b is not None]
    for model in ("dbn", "ssae"):
        cfg = resolve_config({"dataset": str(smoke), "model": model, "hidden_sizes": [4], "folds": 4,
                              "fine_tune": {"epochs": 20, "learning_rate": 0.3}})
        runs.append(run_experiment(cfg))
    checked, worst = 0, 0.0
    for bundle in runs:
        for cm in bundle.summary.confusions:
            r = metrics(cm)
            sens = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else None
            spec = cm.tn / (cm.tn + cm.fp) if cm.tn + cm.fp else None
            assert r.recall == sens and r.specificity == spec
            if r.lr_plus is not None:
                worst = max(worst, abs(r.lr_plus * (1 - spec) - sens))
                checked += 1
            if r.lr_minus is not None:
                worst = max(worst, abs(r.lr_minus * spec - (1 - sens)))
                checked += 1
    fixture = metrics(ConfusionMatrix(tp=443, fp=38, fn=14, tn=10))
    ok = (worst <= 1e-12 and checked > 0 and abs(fixture.lr_plus - 1.22) <= 0.03
          and abs(fixture.lr_minus - 0.16) <= 0.03)
    record(criteria_log, 6, ok,
           f"{checked} ratios from {len(runs)} runs, max identity error {worst:.1e}; "
           f"fixture LR+ {fixture.lr_plus:.4f} (1.22), LR- {fixture.lr_minus:.4f} (0.16)")


# property-based ---------------------------------------------------------------

def _fd(params, loss, step=1e-5):
    out = []
    for p in params:
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + step
            up = loss()
            p[idx] = old - step
            down = loss()
            p[idx] = old
            g[idx] = (up - down) / (2 * step)
        out.append(g)
    return out


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def test_criterion_07_finite_difference_gradients(criteria_log):
    rng = np.random.default_rng(7)
    worst = {"dbn": 0.0, 0.0: 0.0, 3.0: 0.0, 10.0: 0.0}
    for draw in range(100):
        clf = FeedforwardClassifier([(rng.normal(0, 1, (4, 3)), rng.normal(0, 1, 3))],
                                    rng.normal(0, 1, (3, 2)), rng.normal(0, 1, 2))
        X = rng.normal(size=(5, 4))
        y = rng.integers(0, 2, 5)
        _, grads = loss_and_gradients(clf, X, y)
        fd = _fd(clf.parameters(), lambda: loss_and_gradients(clf, X, y)[0])
        worst["dbn"] = max(worst["dbn"], *(_rel(g, f) for g, f in zip(grads, fd)))
        for beta in (0.0, 3.0, 10.0):
            kind = "linear" if draw % 2 else "logistic"
            sae = SparseAutoencoderParams(rng.normal(0, 1, (4, 3)), rng.normal(0, 1, 3),
                                          rng.normal(0, 1, (3, 4)), rng.normal(0, 1, 4), kind)
            B = rng.normal(size=(5, 4)) if kind == "linear" else rng.random((5, 4))
            sp = SparsityConfig(0.05, beta)
            _, grads = sae_loss_and_gradient(sae, B, sp)
            fd = _fd(sae.parameters(), lambda: sae_loss_and_gradient(sae, B, sp)[0])
            worst[beta] = max(worst[beta], *(_rel(g, f) for g, f in zip(grads, fd)))
    ok = max(worst.values()) < 1e-5
    record(criteria_log, 7, ok, "max relative error over 100 draws: dbn {:.1e}, sae beta=0 {:.1e}, "
           "beta=3 {:.1e}, beta=10 {:.1e}".format(worst["dbn"], worst[0.0], worst[3.0], worst[10.0]))


def test_criterion_08_cd1_brute_force(criteria_log):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        p = RbmParams(rng.normal(0, 1, (3, 2)), rng.normal(0, 1, 3), rng.normal(0, 1, 2), VisibleKind.BERNOULLI)
        v0 = (rng.random((2, 3)) > 0.5).astype(float)
        for h_rows in itertools.product(itertools.product([0.0, 1.0], repeat=2), repeat=2):
            h0 = np.array(h_rows)
            new, err = cd1_update(p, v0, 0.25, FixedUniforms(uniforms_forcing(h0)))
            dW, dvb, dhb, oerr = cd1_oracle(p, v0.tolist(), h0.tolist(), 0.25)
            worst = max(worst, np.abs(new.weights - p.weights - dW).max(),
                        np.abs(new.visible_bias - p.visible_bias - dvb).max(),
                        np.abs(new.hidden_bias - p.hidden_bias - dhb).max(), abs(err - oerr))
    record(criteria_log, 8, worst <= 1e-8, f"20 RBMs x 16 hidden states, max deviation {worst:.1e}")


def test_criterion_09_stratified_fold_invariants(criteria_log):
    rng = np.random.default_rng(9)
    failures = 0
    for _ in range(500):
        n = int(rng.integers(4, 150))
        k = int(rng.integers(2, min(10, n) + 1))
        labels = (rng.random(n) < rng.uniform(0.05, 0.6)).astype(int)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = stratified_kfold(labels, k, seed=int(rng.integers(1 << 30)))
        tests = [t for _, t in plan]
        everything = np.concatenate(tests)
        ok = len(everything) == n and len(np.unique(everything)) == n
        for train, test in plan:
            ok &= len(np.intersect1d(train, test)) == 0 and len(train) + len(test) == n
        for cls in (0, 1):
            per_fold = [int(np.sum(labels[t] == cls)) for t in tests]
            ok &= max(per_fold) - min(per_fold) <= 1
        failures += not ok
    record(criteria_log, 9, failures == 0, f"500 random label vectors, {failures} violations")


def test_criterion_10_metrics_against_counting(criteria_log):
    rng = np.random.default_rng(10)
    mismatches = 0
    for _ in range(1000):
        n = int(rng.integers(1, 120))
        pred = rng.integers(0, 2, n)
        actual = rng.integers(0, 2, n)
        positive = int(rng.integers(0, 2))
        tp = fp = fn = tn = 0
        for p, a in zip(pred.tolist(), actual.tolist()):
            tp += p == positive and a == positive
            fp += p == positive and a != positive
            fn += p != positive and a == positive
            tn += p != positive and a != positive
        cm = confusion(pred, actual, positive)
        r = metrics(cm)
        sens = tp / (tp + fn) if tp + fn else None
        spec = tn / (tn + fp) if tn + fp else None
        expected = {
            "accuracy": (tp + tn) / n,
            "precision": tp / (tp + fp) if tp + fp else None,
            "recall": sens,
            "lr_plus": sens / (1 - spec) if sens is not None and spec is not None and spec != 1 else None,
            "lr_minus": (1 - sens) / spec if sens is not None and spec else None,
        }
        mismatches += cm != ConfusionMatrix(tp, fp, fn, tn) or r.as_dict() != expected
    record(criteria_log, 10, mismatches == 0, f"1000 random label pairs, {mismatches} mismatches")


def test_criterion_11_zscore_invariants(criteria_log):
    rng = np.random.default_rng(11)
    worst_mean = worst_std = 0.0
    guard_ok = True
    for _ in range(300):
        n, d = int(rng.integers(2, 80)), int(rng.integers(1, 8))
        X = rng.normal(rng.uniform(-1e3, 1e3, d), 10.0 ** rng.uniform(-3, 3, d), (n, d))
        const = rng.random(d) < 0.2
        X[:, const] = rng.uniform(-50, 50)
        Z = zscore_apply(X, zscore_fit(X))
        live = ~const
        worst_mean = max(worst_mean, np.abs(Z[:, live].mean(axis=0)).max(initial=0.0))
        worst_std = max(worst_std, np.abs(Z[:, live].std(axis=0) - 1).max(initial=0.0))
        guard_ok &= bool(np.all(Z[:, const] == 0.0)) and bool(np.all(np.isfinite(Z)))
    ok = worst_mean < 1e-9 and worst_std < 1e-9 and guard_ok
    record(criteria_log, 11, ok, f"300 matrices: max |mean| {worst_mean:.1e}, max |std-1| {worst_std:.1e}, "
           f"constant-column guard {'held' if guard_ok else 'broken'}")


def test_criterion_12_determinism(criteria_log, tmp_path):
    smoke = write_smoke_arff(tmp_path / "smoke.arff")
    blobs = []
    for run in range(2):
        cfg = resolve_config({"dataset": str(smoke), "model": "ssae", "hidden_sizes": [4, 3], "folds": 2,
                              "seed": 17, "pretrain": {"epochs": 3, "batch_size": 2},
                              "fine_tune": {"epochs": 10, "batch_size": 2, "learning_rate": 0.1}})
        emit_report(run_experiment(cfg), tmp_path / f"run{run}")
        blobs.append((tmp_path / f"run{run}" / "metrics.csv").read_bytes())
    record(criteria_log, 12, blobs[0] == blobs[1] and len(blobs[0]) > 0,
           f"two seeded runs on the 10-sample smoke set, metrics.csv {len(blobs[0])} bytes, "
           f"{'identical' if blobs[0] == blobs[1] else 'different'}")


def test_criterion_13_softmax_and_shift_invariance(criteria_log):
    rng = np.random.default_rng(13)
    logits = rng.normal(0, 1, (1000, 2)) * 10.0 ** rng.uniform(-2, 3, (1000, 1))
    worst = np.abs(softmax(logits).sum(axis=1) - 1).max()
    clf = FeedforwardClassifier([(rng.normal(0, 2, (5, 4)), rng.normal(0, 1, 4))],
                                rng.normal(0, 3, (4, 2)), rng.normal(0, 1, 2))
    X = rng.normal(0, 3, (1000, 5))
    probs, hard = predict(clf, X)
    worst = max(worst, np.abs(probs.sum(axis=1) - 1).max())
    shifts = rng.normal(0, 50, 20)
    stable = all(np.array_equal(predict(FeedforwardClassifier(clf.layers, clf.head_weights,
                                                              clf.head_bias + c), X)[1], hard)
                 for c in shifts)
    record(criteria_log, 13, worst <= 1e-9 and stable,
           f"1000 inputs: max |sum-1| {worst:.1e}; argmax unchanged under {len(shifts)} bias shifts: {stable}")


def test_criterion_14_kl_sparsity(criteria_log):
    rng = np.random.default_rng(14)
    zero = max(abs(kl_sparsity(r, np.full(5, r))) for r in rng.uniform(0.01, 0.99, 50))
    positive = all(kl_sparsity(r, [h]) > 0
                   for r, h in rng.uniform(0.01, 0.99, (500, 2)) if abs(r - h) > 1e-6)
    edges = [kl_sparsity(0.05, [v]) for v in (0.0, 1e-300, 1.0, 1.0 - 1e-17)]
    finite = all(math.isfinite(e) and e > 0 for e in edges)
    spot = kl_sparsity(0.05, [0.2])
    ok = zero <= 1e-12 and positive and finite and abs(spot - 0.09394) < 5e-6
    record(criteria_log, 14, ok, f"zero at rho_hat=rho (max {zero:.1e}), positive elsewhere: {positive}, "
           f"finite at clamp: {finite}, spot value {spot:.5f}")
