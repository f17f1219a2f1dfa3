"""Counterfactual minority oversampling for imbalanced tabular data."""

from ._core import (
    DataError,
    Dataset,
    LinearModel,
    baseline,
    evaluate,
    f_measure,
    g_mean,
    load_csv,
    make_synthetic,
    oversample,
    phi_inv,
    region_census,
    spearman,
    train_ridge,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "Dataset",
    "LinearModel",
    "baseline",
    "evaluate",
    "f_measure",
    "g_mean",
    "load_csv",
    "make_synthetic",
    "oversample",
    "phi_inv",
    "region_census",
    "spearman",
    "train_ridge",
]
