"""Deep belief network and stacked sparse autoencoder defect predictors in numpy."""

__version__ = "0.1.0"

from .data import (Dataset, FoldPlan, NormalizationParams, load_arff, load_csv, load_dataset,
                   stratified_kfold, zscore_apply, zscore_fit)
from .dbn import (FeedforwardClassifier, FineTuneConfig, fine_tune, greedy_pretrain, load_model,
                  predict, save_model, unroll_to_classifier)
from .evaluation import ConfusionMatrix, MetricsReport, confusion, cross_validate, metrics, weighted_rank
from .rbm import RbmParams, RbmTrainConfig, VisibleKind, cd1_update, train_rbm
from .sae import (SaeTrainConfig, SparseAutoencoderParams, SparsityConfig, greedy_stack_sae,
                  kl_sparsity, train_sae, unroll_encoders)
from .experiment import ExperimentConfig, emit_report, resolve_config, run_experiment

__all__ = [
    "Dataset", "FoldPlan", "NormalizationParams", "load_arff", "load_csv", "load_dataset",
    "stratified_kfold", "zscore_apply", "zscore_fit",
    "FeedforwardClassifier", "FineTuneConfig", "fine_tune", "greedy_pretrain", "load_model",
    "predict", "save_model", "unroll_to_classifier",
    "ConfusionMatrix", "MetricsReport", "confusion", "cross_validate", "metrics", "weighted_rank",
    "RbmParams", "RbmTrainConfig", "VisibleKind", "cd1_update", "train_rbm",
    "SaeTrainConfig", "SparseAutoencoderParams", "SparsityConfig", "greedy_stack_sae",
    "kl_sparsity", "train_sae", "unroll_encoders",
    "ExperimentConfig", "emit_report", "resolve_config", "run_experiment",
]
