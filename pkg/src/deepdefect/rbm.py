"""Restricted Boltzmann machines trained with one-step contrastive divergence.

The first RBM of a stack sees z-scored real inputs and uses Gaussian visible
units (unit variance, mean-field reconstruction); every RBM above it sees
hidden probabilities in (0, 1) and uses Bernoulli visible units.  Hidden
units are always Bernoulli.
"""

import enum
from dataclasses import dataclass

import numpy as np

from ._numeric import (NumericOverflowError, as_batch, check_finite, check_params,
                       check_train_config, logistic, minibatches)


class VisibleKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"


@dataclass(eq=False)
class RbmParams:
    weights: np.ndarray  # (n_visible, n_hidden)
    visible_bias: np.ndarray
    hidden_bias: np.ndarray
    visible_kind: VisibleKind = VisibleKind.BERNOULLI

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.visible_bias = np.asarray(self.visible_bias, dtype=np.float64)
        self.hidden_bias = np.asarray(self.hidden_bias, dtype=np.float64)
        self.visible_kind = VisibleKind(self.visible_kind)
        nv, nh = self.weights.shape
        if self.visible_bias.shape != (nv,) or self.hidden_bias.shape != (nh,):
            raise ValueError(
                f"bias shapes {self.visible_bias.shape}, {self.hidden_bias.shape} "
                f"do not match weights {self.weights.shape}")

    @property
    def n_visible(self):
        return self.weights.shape[0]

    @property
    def n_hidden(self):
        return self.weights.shape[1]

    def copy(self):
        return RbmParams(self.weights.copy(), self.visible_bias.copy(),
                         self.hidden_bias.copy(), self.visible_kind)


@dataclass(frozen=True)
class RbmTrainConfig:
    epochs: int = 20
    batch_size: int = 4
    learning_rate: float = 0.001
    seed: int = 0


def init_rbm(n_visible, n_hidden, visible_kind=VisibleKind.BERNOULLI, rng=None, std=0.01):
    """Small Gaussian weights, zero biases."""
    rng = np.random.default_rng(rng)
    return RbmParams(rng.normal(0.0, std, size=(n_visible, n_hidden)),
                     np.zeros(n_visible), np.zeros(n_hidden), visible_kind)


def hidden_probabilities(params, v):
    """p(h_j = 1 | v) for a visible vector or a batch of them."""
    v = as_batch(v, params.n_visible, "visible input")
    check_finite(v, "visible input")
    if params.visible_kind is VisibleKind.BERNOULLI and ((v < 0) | (v > 1)).any():
        raise ValueError("Bernoulli visible units need inputs in [0, 1]")
    return logistic(v @ params.weights + params.hidden_bias)


def visible_reconstruction(params, h):
    """Mean visible values given hidden states or probabilities."""
    h = as_batch(h, params.n_hidden, "hidden input")
    pre = h @ params.weights.T + params.visible_bias
    if params.visible_kind is VisibleKind.GAUSSIAN:
        return pre
    return logistic(pre)


def cd1_update(params, batch, learning_rate, rng):
    """One CD-1 step on a mini-batch.

    Only the first hidden layer is sampled; the reconstruction and the
    second hidden pass use probabilities.  ``rng`` needs a ``random(shape)``
    method returning uniforms in [0, 1).

    Returns the updated parameters and the mean per-unit squared
    reconstruction error of the batch.
    """
    v0 = as_batch(batch, params.n_visible, "batch")
    m = v0.shape[0]
    p0 = hidden_probabilities(params, v0)
    h0 = (rng.random(p0.shape) < p0).astype(np.float64)
    v1 = visible_reconstruction(params, h0)
    p1 = logistic(v1 @ params.weights + params.hidden_bias)

    step = learning_rate / m
    new = RbmParams(
        params.weights + step * (v0.T @ p0 - v1.T @ p1),
        params.visible_bias + step * (v0 - v1).sum(axis=0),
        params.hidden_bias + step * (p0 - p1).sum(axis=0),
        params.visible_kind,
    )
    check_params((new.weights, new.visible_bias, new.hidden_bias))
    error = float(np.mean(np.sum((v0 - v1) ** 2, axis=1) / params.n_visible))
    return new, error


def train_rbm(init, data, config):
    """Run ``config.epochs`` shuffled passes of CD-1 over ``data``.

    Returns the trained parameters and the mean batch reconstruction error
    of every epoch.
    """
    data = as_batch(data, init.n_visible, "training data")
    check_train_config(config, data.shape[0])
    rng = np.random.default_rng(config.seed)
    params = init.copy()
    errors = np.empty(config.epochs)
    for epoch in range(config.epochs):
        batch_errors = []
        for b, idx in enumerate(minibatches(data.shape[0], config.batch_size, rng)):
            try:
                params, err = cd1_update(params, data[idx], config.learning_rate, rng)
            except NumericOverflowError as exc:
                raise NumericOverflowError(f"RBM epoch {epoch}, batch {b}: {exc}") from exc
            batch_errors.append(err)
        errors[epoch] = np.mean(batch_errors)
    return params, errors
