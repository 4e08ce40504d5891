"""Shared numerical helpers: stable logistic/softmax and the parameter guard."""

import numpy as np
from scipy.special import expit

# largest magnitude any trained parameter may reach before training aborts
PARAM_LIMIT = 1e6

_TINY = np.finfo(np.float64).tiny
_ONE_MINUS = np.nextafter(1.0, 0.0)


class NumericOverflowError(FloatingPointError):
    """Raised when training produces non-finite or runaway parameters."""


def logistic(x):
    """Logistic function kept strictly inside (0, 1).

    ``expit`` never overflows; the clip only touches values that already
    rounded to exactly 0.0 or 1.0 in float64.
    """
    return np.clip(expit(x), _TINY, _ONE_MINUS)


def softmax(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def check_params(arrays, where=""):
    for a in arrays:
        if not np.all(np.isfinite(a)) or np.any(np.abs(a) > PARAM_LIMIT):
            msg = "parameters became non-finite or exceeded %g in magnitude" % PARAM_LIMIT
            raise NumericOverflowError(f"{where}: {msg}" if where else msg)


def as_batch(x, width, name="input"):
    """Promote a vector to a one-row matrix and validate its width."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] != width:
        raise ValueError(f"{name} has shape {np.shape(x)}, expected width {width}")
    return a


def check_finite(a, name="input"):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")


def minibatches(n, batch_size, rng):
    """Yield index arrays for one shuffled pass over ``n`` rows."""
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def check_train_config(config, n_samples):
    if config.epochs < 0:
        raise ValueError("epochs must be non-negative")
    if config.batch_size < 1:
        raise ValueError("batch_size must be positive")
    if config.batch_size > n_samples:
        raise ValueError(
            f"batch_size {config.batch_size} exceeds the {n_samples} training samples")
    if not config.learning_rate >= 0:
        raise ValueError("learning_rate must be non-negative")
