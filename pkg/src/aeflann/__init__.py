"""Functional-link networks with autoencoder feature reduction.

Multi-label classifier built from three fixed-then-trainable stages:
trigonometric functional expansion, an optional frozen under-complete
autoencoder, and a delta-rule sigmoid output layer.  Ships with a
Mulan/CSV dataset loader, the standard eight multi-label metrics, and a
seeded cross-validation harness.
"""

from .autoencoder import (
    AeTrainConfig,
    AutoencoderParams,
    decode,
    encode,
    reconstruction_mse,
    train_autoencoder,
)
from .classifier import (
    AeMlFlannModel,
    LabelMode,
    TrainConfig,
    load_model,
    predict_class,
    predict_labels,
    predict_scores,
    save_model,
    train,
)
from .config import RunConfig, load_dataset, parse_run_config
from .datasets import (
    FoldPlan,
    MultiLabelDataset,
    NormalizationParams,
    SingleLabelDataset,
    apply_normalizer,
    fit_normalizer,
    load_csv_single_label,
    load_mulan,
    make_folds,
    one_hot,
    split_indices,
    write_mulan,
)
from .evaluation import CvResult, TTestResult, cross_validate, paired_t_test, render_report
from .expansion import ExpansionConfig, expand
from .linalg import Activation, SeededRng
from .metrics import MetricsReport, compute_report, mean_report

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "AeMlFlannModel",
    "AeTrainConfig",
    "AutoencoderParams",
    "CvResult",
    "ExpansionConfig",
    "FoldPlan",
    "LabelMode",
    "MetricsReport",
    "MultiLabelDataset",
    "NormalizationParams",
    "RunConfig",
    "SeededRng",
    "SingleLabelDataset",
    "TTestResult",
    "TrainConfig",
    "apply_normalizer",
    "compute_report",
    "cross_validate",
    "decode",
    "encode",
    "expand",
    "fit_normalizer",
    "load_csv_single_label",
    "load_dataset",
    "load_model",
    "load_mulan",
    "make_folds",
    "mean_report",
    "one_hot",
    "paired_t_test",
    "parse_run_config",
    "predict_class",
    "predict_labels",
    "predict_scores",
    "reconstruction_mse",
    "render_report",
    "save_model",
    "split_indices",
    "train",
    "train_autoencoder",
    "write_mulan",
]
