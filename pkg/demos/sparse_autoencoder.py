"""
Sparsity in an autoencoder
==========================

Trains the same autoencoder with and without the KL penalty and compares
the mean hidden activation with the target rho.
"""

import numpy as np

from deepdefect import SaeTrainConfig, SparsityConfig, kl_sparsity, train_sae
from deepdefect.sae import encode, init_autoencoder

rng = np.random.default_rng(0)
X = rng.normal(size=(200, 8))

# KL(rho || rho_hat) grows quickly once rho_hat leaves rho behind
for rho_hat in (0.05, 0.1, 0.2, 0.5, 0.9):
    print(f"KL(0.05 || {rho_hat:.2f}) = {kl_sparsity(0.05, [rho_hat]):.5f}")

init = init_autoencoder(8, 12, "linear", rng=0)
print(f"\nbefore training: mean activation {encode(init, X).mean():.3f}")
for beta in (0.0, 3.0):
    sparsity = SparsityConfig(rho=0.05, beta=beta)
    params, losses = train_sae(init, X, sparsity, SaeTrainConfig(epochs=50, batch_size=4, learning_rate=0.05))
    h = encode(params, X)
    print(f"beta={beta}: loss {losses[0]:.3f} -> {losses[-1]:.3f}, "
          f"mean activation {h.mean():.3f}, units mostly off {np.mean(h.mean(axis=0) < 0.1):.0%}")
