"""
Pretraining a stack of RBMs
===========================

Greedy layer-wise pretraining on the CM1 metrics, then a look at what the
unrolled network does before any supervised training.
"""

import numpy as np

from deepdefect import (RbmTrainConfig, VisibleKind, greedy_pretrain, load_arff, predict,
                        unroll_to_classifier, zscore_apply, zscore_fit)
from deepdefect.rbm import init_rbm, train_rbm

ds = load_arff("data/nasa/CM1.arff")
X = zscore_apply(ds.features, zscore_fit(ds.features))
print(f"{ds.name}: {ds.n_samples} modules, {ds.n_features} metrics, {ds.defective_rate:.1%} defective")

# A single Gaussian-visible RBM.  The reconstruction error is the mean squared
# difference between a batch and its one-step mean-field reconstruction.
rbm = init_rbm(ds.n_features, 30, VisibleKind.GAUSSIAN, rng=0)
for lr in (0.001, 0.01):
    _, errors = train_rbm(rbm, X, RbmTrainConfig(epochs=20, batch_size=4, learning_rate=lr, seed=0))
    print(f"lr={lr}: reconstruction error {errors[0]:.4f} -> {errors[-1]:.4f}")

# The full stack used for CM1 has 30 and 12 hidden units.  The second RBM
# sees the hidden probabilities of the first as Bernoulli visibles.
stack = greedy_pretrain(X, [30, 12], RbmTrainConfig(epochs=20, batch_size=4, learning_rate=0.001))
for i, r in enumerate(stack):
    print(f"layer {i}: {r.visible_kind.value:9s} {r.weights.shape}, |W| max {np.abs(r.weights).max():.4f}")

# Unroll under a fresh softmax head.  With weights this small every module
# lands close to the same point, which is why fine-tuning starts from a
# near-constant classifier.
clf = unroll_to_classifier(stack, n_classes=2, seed=0)
probs, hard = predict(clf, X)
print(f"untrained head: P(class 1) ranges over [{probs[:, 1].min():.5f}, {probs[:, 1].max():.5f}]")
