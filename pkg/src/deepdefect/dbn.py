"""Deep belief network: greedy RBM stacking, unrolling and supervised fine-tuning.

The unrolled network is a plain stack of logistic layers topped by a softmax
head.  The same classifier type is produced from sparse-autoencoder stacks
(:func:`deepdefect.sae.unroll_encoders`), so fine-tuning, prediction and
serialization are shared by both models.
"""

from dataclasses import dataclass, replace

import numpy as np

from ._numeric import (as_batch, check_finite, check_params,
                       check_train_config, logistic, minibatches, softmax)
from .rbm import VisibleKind, hidden_probabilities, init_rbm, train_rbm

FORMAT_VERSION = 1


def check_layer_spec(hidden_sizes):
    sizes = tuple(int(s) for s in hidden_sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError(f"hidden layer sizes must be a non-empty list of positive ints, got {hidden_sizes!r}")
    return sizes


@dataclass(eq=False)
class FeedforwardClassifier:
    """Logistic hidden layers followed by a softmax output layer."""

    layers: list  # [(weights (n_in, n_out), bias (n_out,)), ...]
    head_weights: np.ndarray
    head_bias: np.ndarray
    kind: str = "dbn"

    def __post_init__(self):
        self.layers = [(np.asarray(W, dtype=np.float64), np.asarray(b, dtype=np.float64))
                       for W, b in self.layers]
        self.head_weights = np.asarray(self.head_weights, dtype=np.float64)
        self.head_bias = np.asarray(self.head_bias, dtype=np.float64)
        width = self.layers[0][0].shape[0] if self.layers else self.head_weights.shape[0]
        for i, (W, b) in enumerate(self.layers):
            if W.shape[0] != width or b.shape != (W.shape[1],):
                raise ValueError(f"layer {i} has shapes {W.shape}/{b.shape}, expected input width {width}")
            width = W.shape[1]
        if self.head_weights.shape[0] != width or self.head_bias.shape != (self.head_weights.shape[1],):
            raise ValueError("softmax head does not match the top hidden layer")

    @property
    def n_inputs(self):
        return self.layers[0][0].shape[0] if self.layers else self.head_weights.shape[0]

    @property
    def n_classes(self):
        return self.head_weights.shape[1]

    @property
    def shapes(self):
        return [W.shape for W, _ in self.layers] + [self.head_weights.shape]

    def parameters(self):
        """All parameter arrays, bottom layer first, head last."""
        out = []
        for W, b in self.layers:
            out += [W, b]
        return out + [self.head_weights, self.head_bias]

    def copy(self):
        return FeedforwardClassifier([(W.copy(), b.copy()) for W, b in self.layers],
                                     self.head_weights.copy(), self.head_bias.copy(), self.kind)


@dataclass(frozen=True)
class FineTuneConfig:
    epochs: int = 150
    batch_size: int = 4
    learning_rate: float = 0.01
    seed: int = 0


def greedy_pretrain(train_features, hidden_sizes, config):
    """Train one RBM per hidden layer, each on the layer below's probabilities.

    The bottom RBM has Gaussian visible units; the rest are Bernoulli.
    Layer ``l`` is initialized from ``(seed, l)`` and trained with seed
    ``(seed, l)`` so layers never share a random stream.
    """
    sizes = check_layer_spec(hidden_sizes)
    x = as_batch(train_features, np.shape(train_features)[-1], "training features")
    rbms = []
    for layer, n_hidden in enumerate(sizes):
        kind = VisibleKind.GAUSSIAN if layer == 0 else VisibleKind.BERNOULLI
        init = init_rbm(x.shape[1], n_hidden, kind, rng=np.random.default_rng((config.seed, layer)))
        params, _ = train_rbm(init, x, replace(config, seed=(config.seed, layer)))
        rbms.append(params)
        x = hidden_probabilities(params, x)
    return rbms


def _new_head(n_top, n_classes, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, 0.01, size=(n_top, n_classes)), np.zeros(n_classes)


def unroll_to_classifier(rbms, n_classes=2, seed=0):
    """Copy RBM weights and hidden biases into a feedforward net with a softmax head."""
    if not rbms:
        raise ValueError("need at least one RBM")
    for i in range(1, len(rbms)):
        if rbms[i].n_visible != rbms[i - 1].n_hidden:
            raise ValueError(
                f"RBM {i} expects {rbms[i].n_visible} inputs but RBM {i - 1} "
                f"has {rbms[i - 1].n_hidden} hidden units")
    head_W, head_b = _new_head(rbms[-1].n_hidden, n_classes, seed)
    return FeedforwardClassifier([(r.weights.copy(), r.hidden_bias.copy()) for r in rbms],
                                 head_W, head_b, kind="dbn")


def forward(classifier, features):
    """Return the list of layer activations (input first) and class probabilities."""
    a = as_batch(features, classifier.n_inputs, "features")
    acts = [a]
    for W, b in classifier.layers:
        a = logistic(a @ W + b)
        acts.append(a)
    return acts, softmax(a @ classifier.head_weights + classifier.head_bias)


def loss_and_gradients(classifier, features, labels):
    """Mean softmax cross-entropy and its gradient for every parameter.

    Gradients come back in the order of :meth:`FeedforwardClassifier.parameters`.
    """
    acts, _ = forward(classifier, features)
    y = np.asarray(labels, dtype=np.int64)
    m = y.shape[0]
    logits = acts[-1] @ classifier.head_weights + classifier.head_bias
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    loss = -log_probs[np.arange(m), y].mean()

    delta = np.exp(log_probs)
    delta[np.arange(m), y] -= 1.0
    delta /= m
    grads = [acts[-1].T @ delta, delta.sum(axis=0)]
    back = delta @ classifier.head_weights.T
    for i in range(len(classifier.layers) - 1, -1, -1):
        a = acts[i + 1]
        back = back * a * (1.0 - a)
        grads = [acts[i].T @ back, back.sum(axis=0)] + grads
        if i:
            back = back @ classifier.layers[i][0].T
    return float(loss), grads


def error_rate(classifier, features, labels):
    _, hard = predict(classifier, features)
    return float(np.mean(hard != np.asarray(labels)))


def fine_tune(classifier, train_features, train_labels, config):
    """Mini-batch SGD on cross-entropy over the whole unrolled network.

    Returns the tuned copy and the training misclassification rate after
    every epoch.
    """
    X = as_batch(train_features, classifier.n_inputs, "training features")
    y = np.asarray(train_labels, dtype=np.int64)
    if y.shape != (X.shape[0],):
        raise ValueError("need exactly one label per training row")
    if ((y < 0) | (y >= classifier.n_classes)).any():
        raise ValueError("labels outside the classifier's classes")
    check_train_config(config, X.shape[0])
    clf = classifier.copy()
    params = clf.parameters()
    lr = config.learning_rate
    rng = np.random.default_rng(config.seed)
    errors = np.empty(config.epochs)
    for epoch in range(config.epochs):
        for idx in minibatches(X.shape[0], config.batch_size, rng):
            _, grads = loss_and_gradients(clf, X[idx], y[idx])
            for p, g in zip(params, grads):
                p -= lr * g
        check_params(params, f"fine-tune epoch {epoch}")
        errors[epoch] = error_rate(clf, X, y)
    return clf, errors


def predict(classifier, features):
    """Class probabilities and hard labels (ties go to the lower class index)."""
    X = as_batch(features, classifier.n_inputs, "features")
    check_finite(X, "features")
    _, probs = forward(classifier, X)
    return probs, probs.argmax(axis=1)


def save_model(path, classifier):
    """Write the classifier as an ``.npz`` archive with shapes and a format version."""
    arrays = {"format_version": np.array(FORMAT_VERSION), "kind": np.array(classifier.kind),
              "n_layers": np.array(len(classifier.layers)),
              "head_weights": classifier.head_weights, "head_bias": classifier.head_bias}
    for i, (W, b) in enumerate(classifier.layers):
        arrays[f"layer{i}_weights"] = W
        arrays[f"layer{i}_bias"] = b
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_model(path):
    with np.load(path, allow_pickle=False) as z:
        version = int(z["format_version"])
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        layers = [(z[f"layer{i}_weights"], z[f"layer{i}_bias"]) for i in range(int(z["n_layers"]))]
        return FeedforwardClassifier(layers, z["head_weights"], z["head_bias"], str(z["kind"]))
