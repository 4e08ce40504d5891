"""Published reference numbers for the fourteen NASA datasets.

Everything here is static, read-only data transcribed from the original
study's tables: dataset sizes (Table 2), training hyperparameters (Table 3),
per-dataset layer sizes (Table 4), accuracy comparison (Table 5) and the
per-metric comparison (Table 6).
"""

from types import MappingProxyType

PROVENANCE = "Table 5"

# name -> (samples, defective fraction)
DATASET_STATS = MappingProxyType({
    "CM1": (505, 0.095), "KC1": (2107, 0.154), "KC2": (522, 0.201),
    "KC3": (458, 0.093), "KC4": (125, 0.6), "MC1": (9466, 0.007),
    "MC2": (161, 0.322), "PC1": (1107, 0.068), "PC2": (5589, 0.004),
    "PC3": (1563, 0.102), "PC4": (1458, 0.122), "PC5": (17186, 0.030),
    "JM1": (10878, 0.19), "MW1": (403, 0.08),
})

DATASETS = tuple(DATASET_STATS)

HYPERPARAMETERS = MappingProxyType({
    "dbn": {"pretrain_epochs": 20, "batch_size": 4, "epochs": 150,
            "fine_tune_learning_rate": 0.01, "pretrain_learning_rate": 0.001},
    "ssae": {"pretrain_epochs": 50, "batch_size": 4, "epochs": 150,
             "fine_tune_learning_rate": 0.01, "rho": 0.05},
})

ARCHITECTURES = MappingProxyType({
    "CM1": {"dbn": (30, 12), "ssae": (25, 15, 7)},
    "KC1": {"dbn": (20, 15, 10), "ssae": (25, 15, 8, 4)},
    "KC2": {"dbn": (20, 10), "ssae": (20, 10)},
    "KC3": {"dbn": (15, 5), "ssae": (15, 10)},
    "KC4": {"dbn": (15, 5), "ssae": (15, 8)},
    "MC1": {"dbn": (40, 25, 10), "ssae": (40, 30, 20, 10)},
    "MC2": {"dbn": (30, 10), "ssae": (30, 15)},
    "PC1": {"dbn": (20, 15, 10), "ssae": (20, 10, 10, 5)},
    "PC2": {"dbn": (20, 10, 10, 10), "ssae": (20, 20, 10, 10, 10)},
    "PC3": {"dbn": (20, 10), "ssae": (20, 10, 10)},
    "PC4": {"dbn": (30, 20, 10), "ssae": (25, 20, 10, 10)},
    "PC5": {"dbn": (35, 30, 20, 10, 8), "ssae": (35, 30, 20, 20, 10)},
    "JM1": {"dbn": (50, 30, 20, 8), "ssae": (40, 30, 10, 8)},
    "MW1": {"dbn": (30, 15, 4), "ssae": (30, 15, 4)},
})

METHODS = ("DBN", "SSAE", "VOTE", "CSVS+CSNN", "CSLS+CSNN", "CBA2", "SVM")

# accuracy in percent: method -> dataset -> (mean, std or None); missing cells omitted
_T5 = {
    "CM1": [(88.57, 1.9), (88.59, 2.61), (89.64, 2.30), (77.60, 0.42), (74.44, 0.56), (80.36, None), (68, None)],
    "KC1": [(85.83, 0.86), (85.63, 1.23), (85.62, 1.64), None, None, (83.71, None), None],
    "KC2": [(81.60, 1.1), (84.48, 0.85), (82.91, 3.38), (74.07, 0.59), (74.82, 0.68), None, None],
    "KC3": [(75.36, 0.52), (77.60, 2.8), (89.98, 3.20), None, None, (90.91, None), (66, None)],
    "KC4": [(69.59, 0.8), (69.60, 1.6), (75.38, 11.43), None, None, (85.37, None), (71, None)],
    "PC1": [(92.51, 0.78), (94.13, 1.46), (93.73, 1.45), (83.73, 1.93), (82.01, 2.23), (91.78, None), (71, None)],
    "PC2": [(97.79, 0.11), (99.39, 0.08), (99.53, 0.13), (99.63, 0.11), (99.19, 0.20), (99.20, None), (64, None)],
    "PC3": [(87.26, 0.72), (90.21, 0.97), (89.12, 1.77), (75.80, 0.39), (78.80, 0.18), (86.48, None), (76, None)],
    "PC4": [(88.06, 0.48), (91.22, 1.17), (90.28, 1.75), (82.23, 1.09), (85.00, 0.25), (83.96, None), (82, None)],
    "PC5": [(97.07, 0.66), (97.47, 0.74), (97.46, 0.23), None, None, None, (69, None)],
    "JM1": [(81.32, 0.12), (84.59, 0.65), (81.44, 0.56), None, None, (73.52, None), None],
    "MW1": [(92.55, 0.53), (93.30, 1.78), (91.67, 3.07), (87.93, 0.43), (85.06, 0.59), (91.04, None), (71, None)],
    "MC1": [(99.12, 0.04), (99.53, 0.12), (99.42, 0.13), None, None, (95.00, None), (65, None)],
    "MC2": [(59.62, 3.10), (61.49, 4.75), (72.57, 7.14), None, None, (69.81, None), (64, None)],
}

ACCURACY_TABLE = MappingProxyType({
    method: MappingProxyType({d: row[j] for d, row in _T5.items() if row[j] is not None})
    for j, method in enumerate(METHODS)
})

# final row of the accuracy comparison, in METHODS order
PRINTED_WEIGHTED_RANK = MappingProxyType(dict(zip(METHODS, (3, 1, 2, 6, 7, 4, 5))))

# dataset -> model -> (recall, accuracy, precision, LR+, LR-)
METRIC_TABLE = MappingProxyType({
    "CM1": {"ssae": (0.97, 0.90, 0.92, 1.22, 0.16), "dbn": (0.95, 0.88, 0.91, 1.09, 0.37)},
    "KC1": {"ssae": (0.95, 0.86, 0.89, 1.43, 0.14), "dbn": (0.96, 0.86, 0.88, 1.41, 0.13)},
    "KC2": {"ssae": (0.91, 0.81, 0.87, 1.45, 0.21), "dbn": (0.9, 0.83, 0.87, 1.8, 0.16)},
    "KC3": {"ssae": (0.82, 0.77, 0.92, 1.13, 0.66), "dbn": (0.80, 0.75, 0.91, 1.07, 0.79)},
    "KC4": {"ssae": (0.83, 0.70, 0.66, 1.87, 0.31), "dbn": (0.83, 0.70, 0.66, 1.87, 0.31)},
    "PC1": {"ssae": (0.98, 0.94, 0.95, 1.58, 0.04), "dbn": (0.99, 0.93, 0.94, 1.1, 0.13)},
    "PC2": {"ssae": (0.99, 0.99, 0.99, 1.04, 0.05), "dbn": (0.98, 0.98, 0.99, 0.98, 0)},
    "PC3": {"ssae": (0.97, 0.9, 0.92, 1.39, 0.1), "dbn": (0.95, 0.87, 0.92, 1.23, 0.23)},
    "PC4": {"ssae": (0.99, 0.91, 0.91, 1.4, 0.04), "dbn": (0.97, 0.88, 0.9, 1.25, 0.12)},
    "PC5": {"ssae": (0.99, 0.97, 0.98, 1.42, 0.02), "dbn": (0.99, 0.97, 0.98, 1.37, 0.03)},
    "JM1": {"ssae": (0.99, 0.85, 0.84, 1.25, 0.01), "dbn": (0.99, 0.81, 0.82, 1.08, 0.15)},
    "MW1": {"ssae": (0.99, 0.93, 0.93, 1.15, 0), "dbn": (0.99, 0.93, 0.93, 1.03, 0)},
    "MC1": {"ssae": (0.99, 0.99, 0.99, 1.58, 0), "dbn": (0.99, 0.99, 0.99, 1.04, 0.04)},
    "MC2": {"ssae": (0.85, 0.61, 0.67, 0.96, 1.27), "dbn": (0.83, 0.6, 0.66, 0.92, 1.72)},
})


def accuracy_means():
    """method -> {dataset: mean accuracy} for :func:`deepdefect.evaluation.weighted_rank`."""
    return {m: {d: v[0] for d, v in cells.items()} for m, cells in ACCURACY_TABLE.items()}
