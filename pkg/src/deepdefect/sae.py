"""Sparse autoencoders with a KL-divergence sparsity penalty, and their stacking.

Encoders are logistic.  The bottom autoencoder reconstructs z-scored inputs
with a linear decoder; higher ones reconstruct activations in (0, 1) with a
logistic decoder.  Encoder and decoder weights are untied.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

from ._numeric import (NumericOverflowError, as_batch, check_params, check_train_config,
                       logistic, minibatches)
from .dbn import FeedforwardClassifier, _new_head, check_layer_spec

KL_EPS = 1e-8


class OutputKind(str, enum.Enum):
    LINEAR = "linear"
    LOGISTIC = "logistic"


@dataclass(eq=False)
class SparseAutoencoderParams:
    encoder_weights: np.ndarray  # (n_in, n_hidden)
    encoder_bias: np.ndarray
    decoder_weights: np.ndarray  # (n_hidden, n_in)
    decoder_bias: np.ndarray
    output_kind: OutputKind = OutputKind.LINEAR

    def __post_init__(self):
        self.encoder_weights = np.asarray(self.encoder_weights, dtype=np.float64)
        self.encoder_bias = np.asarray(self.encoder_bias, dtype=np.float64)
        self.decoder_weights = np.asarray(self.decoder_weights, dtype=np.float64)
        self.decoder_bias = np.asarray(self.decoder_bias, dtype=np.float64)
        self.output_kind = OutputKind(self.output_kind)
        n_in, n_hidden = self.encoder_weights.shape
        if (self.encoder_bias.shape != (n_hidden,)
                or self.decoder_weights.shape != (n_hidden, n_in)
                or self.decoder_bias.shape != (n_in,)):
            raise ValueError("encoder/decoder shapes do not chain")

    @property
    def n_in(self):
        return self.encoder_weights.shape[0]

    @property
    def n_hidden(self):
        return self.encoder_weights.shape[1]

    def parameters(self):
        return [self.encoder_weights, self.encoder_bias, self.decoder_weights, self.decoder_bias]

    def copy(self):
        return SparseAutoencoderParams(*(p.copy() for p in self.parameters()), self.output_kind)


@dataclass(frozen=True)
class SparsityConfig:
    rho: float = 0.05
    beta: float = 3.0

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie strictly between 0 and 1")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")


@dataclass(frozen=True)
class SaeTrainConfig:
    epochs: int = 50
    batch_size: int = 4
    learning_rate: float = 0.01
    seed: int = 0


def init_autoencoder(n_in, n_hidden, output_kind=OutputKind.LINEAR, rng=None, std=0.01):
    rng = np.random.default_rng(rng)
    return SparseAutoencoderParams(rng.normal(0.0, std, size=(n_in, n_hidden)), np.zeros(n_hidden),
                                   rng.normal(0.0, std, size=(n_hidden, n_in)), np.zeros(n_in),
                                   output_kind)


def encode(params, x):
    x = as_batch(x, params.n_in, "autoencoder input")
    return logistic(x @ params.encoder_weights + params.encoder_bias)


def sae_forward(params, x):
    """Hidden activations and reconstruction for a vector or batch."""
    h = encode(params, x)
    out = h @ params.decoder_weights + params.decoder_bias
    if params.output_kind is OutputKind.LOGISTIC:
        out = logistic(out)
    return h, out


def kl_sparsity(rho, rho_hat):
    """Sum over hidden units of KL(rho || rho_hat_j) between Bernoulli means."""
    r = np.clip(np.asarray(rho_hat, dtype=np.float64), KL_EPS, 1.0 - KL_EPS)
    return float(np.sum(rho * np.log(rho / r) + (1.0 - rho) * np.log((1.0 - rho) / (1.0 - r))))


def sae_loss_and_gradient(params, batch, sparsity):
    """Half mean squared reconstruction error plus ``beta`` times the KL penalty.

    ``rho_hat`` is the mean hidden activation over this batch.  Gradients are
    returned in the order of :meth:`SparseAutoencoderParams.parameters`.
    """
    x = as_batch(batch, params.n_in, "batch")
    m = x.shape[0]
    h, out = sae_forward(params, x)
    rho, beta = sparsity.rho, sparsity.beta
    rho_hat = np.clip(h.mean(axis=0), KL_EPS, 1.0 - KL_EPS)
    diff = out - x
    loss = 0.5 * np.sum(diff ** 2) / m + beta * kl_sparsity(rho, rho_hat)

    d_out = diff / m
    if params.output_kind is OutputKind.LOGISTIC:
        d_out = d_out * out * (1.0 - out)
    g_dec_w = h.T @ d_out
    g_dec_b = d_out.sum(axis=0)
    d_h = d_out @ params.decoder_weights.T + beta * (-rho / rho_hat + (1.0 - rho) / (1.0 - rho_hat)) / m
    d_pre = d_h * h * (1.0 - h)
    grads = [x.T @ d_pre, d_pre.sum(axis=0), g_dec_w, g_dec_b]
    return float(loss), grads


def train_sae(init, data, sparsity, config):
    """Mini-batch gradient descent on the sparse reconstruction loss.

    Returns the trained copy and the mean batch loss of every epoch.
    """
    data = as_batch(data, init.n_in, "training data")
    check_train_config(config, data.shape[0])
    params = init.copy()
    arrays = params.parameters()
    rng = np.random.default_rng(config.seed)
    losses = np.empty(config.epochs)
    for epoch in range(config.epochs):
        batch_losses = []
        for idx in minibatches(data.shape[0], config.batch_size, rng):
            loss, grads = sae_loss_and_gradient(params, data[idx], sparsity)
            for p, g in zip(arrays, grads):
                p -= config.learning_rate * g
            batch_losses.append(loss)
        try:
            check_params(arrays)
        except NumericOverflowError as exc:
            raise NumericOverflowError(f"autoencoder epoch {epoch}: {exc}") from exc
        losses[epoch] = np.mean(batch_losses)
    return params, losses


def greedy_stack_sae(train_features, hidden_sizes, sparsity, config):
    """Train one sparse autoencoder per hidden layer on the activations below it."""
    sizes = check_layer_spec(hidden_sizes)
    x = as_batch(train_features, np.shape(train_features)[-1], "training features")
    encoders = []
    for layer, n_hidden in enumerate(sizes):
        kind = OutputKind.LINEAR if layer == 0 else OutputKind.LOGISTIC
        init = init_autoencoder(x.shape[1], n_hidden, kind, rng=np.random.default_rng((config.seed, layer)))
        params, _ = train_sae(init, x, sparsity, replace(config, seed=(config.seed, layer)))
        encoders.append(params)
        x = encode(params, x)
    return encoders


def unroll_encoders(encoders, n_classes=2, seed=0):
    """Stack the encoder halves under a fresh softmax head; decoders are discarded."""
    if not encoders:
        raise ValueError("need at least one autoencoder")
    for i in range(1, len(encoders)):
        if encoders[i].n_in != encoders[i - 1].n_hidden:
            raise ValueError(f"autoencoder {i} does not chain onto autoencoder {i - 1}")
    head_W, head_b = _new_head(encoders[-1].n_hidden, n_classes, seed)
    return FeedforwardClassifier([(e.encoder_weights.copy(), e.encoder_bias.copy()) for e in encoders],
                                 head_W, head_b, kind="ssae")
