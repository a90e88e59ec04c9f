"""The two-stage transformation classifier and its single-label variant.

Pipeline: min-max normalization -> trigonometric expansion -> optional
frozen autoencoder encoding -> one trainable sigmoid output layer.  The
output layer learns by the per-instance delta rule (equivalent to
stochastic gradient descent on the per-instance squared error); the
normalizer, expansion, and encoder never change once fit.

With the encoder disabled the model is the plain functional-link
baseline, useful as an ablation.  In single-label mode targets are
one-hot and prediction takes the argmax score instead of thresholding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .autoencoder import AeTrainConfig, AutoencoderParams, encode, train_autoencoder
from .datasets import (
    MultiLabelDataset,
    NormalizationParams,
    apply_normalizer,
    fit_normalizer,
)
from .errors import (
    ConfigError,
    DataError,
    DivergenceError,
    ModeError,
    ModelFormatError,
    ShapeError,
)
from .expansion import ExpansionConfig, expand
from .linalg import (
    Activation,
    SeededRng,
    activation_prime_from_output,
    apply_activation,
    as_matrix,
    uniform_init,
)

MODEL_FORMAT = "aeflann-model"
MODEL_VERSION = 1


class LabelMode(str, Enum):
    MULTI_LABEL = "multi_label"
    SINGLE_LABEL = "single_label"


@dataclass
class TrainConfig:
    """Output-layer hyperparameters plus the nested autoencoder config."""

    mu: float = 0.1
    epochs: int = 500
    seed: int = 0
    init_scale: float = 0.5
    ae: AeTrainConfig = field(default_factory=AeTrainConfig)

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ConfigError(f"learning rate mu must be positive, got {self.mu}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.init_scale <= 0:
            raise ConfigError(f"init_scale must be positive, got {self.init_scale}")


@dataclass
class AeMlFlannModel:
    """Trained pipeline: normalizer, expansion, optional encoder, output layer.

    ``encoder is None`` marks the functional-link ablation.  ``out_w``
    has one row per hidden unit (encoder width, or d * p without an
    encoder) and one column per label/class.
    """

    norm: NormalizationParams
    expansion: ExpansionConfig
    encoder: AutoencoderParams | None
    out_w: np.ndarray
    out_b: np.ndarray
    out_act: Activation = Activation.SIGMOID
    mode: LabelMode = LabelMode.MULTI_LABEL
    threshold: float = 0.5

    def __post_init__(self) -> None:
        self.out_w = as_matrix(self.out_w)
        self.out_b = np.ascontiguousarray(self.out_b, dtype=np.float64)
        self.out_act = Activation(self.out_act)
        self.mode = LabelMode(self.mode)
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.out_b.shape != (self.out_w.shape[1],):
            raise ShapeError("out_b length does not match out_w columns")
        if self.encoder is not None and self.encoder.hidden_width != self.out_w.shape[0]:
            raise ShapeError("out_w rows do not match the encoder hidden width")

    @property
    def n_classes(self) -> int:
        return self.out_w.shape[1]

    @property
    def input_width(self) -> int:
        return self.norm.width


def delta_rule_update(
    a: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    b: np.ndarray,
    mu: float,
    act: Activation = Activation.SIGMOID,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-instance weight and bias increments for the output layer.

    For hidden activations ``a`` and target row ``y``:
    ``y_hat = act(a @ w + b)``, ``delta = act'(y_hat) * (y - y_hat)``,
    and the increments are ``mu * outer(a, delta)`` and ``mu * delta``.
    This equals ``-mu`` times the gradient of the per-instance squared
    error ``0.5 * sum((y - y_hat)^2)`` under the sigmoid activation.
    """
    y_hat = apply_activation(a @ w + b, act)
    delta = activation_prime_from_output(y_hat, act) * (y - y_hat)
    return mu * np.outer(a, delta), mu * delta


def _fit_output_layer(
    hidden: np.ndarray,
    targets: np.ndarray,
    cfg: TrainConfig,
    act: Activation = Activation.SIGMOID,
) -> tuple[np.ndarray, np.ndarray]:
    n, h = hidden.shape
    c = targets.shape[1]
    rng = SeededRng(cfg.seed)
    w = uniform_init(h, c, cfg.init_scale, rng)
    b = rng.uniform(-cfg.init_scale, cfg.init_scale, c)
    # overflow in a diverging run is caught by the per-epoch check below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, cfg.epochs + 1):
            for i in rng.permutation(n):
                dw, db = delta_rule_update(hidden[i], targets[i], w, b, cfg.mu, act)
                w += dw
                b += db
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise DivergenceError(f"output layer diverged at epoch {epoch}")
    return w, b


def train(
    data: MultiLabelDataset,
    expansion: ExpansionConfig,
    cfg: TrainConfig,
    use_autoencoder: bool = True,
    mode: LabelMode = LabelMode.MULTI_LABEL,
    threshold: float = 0.5,
) -> AeMlFlannModel:
    """Fit the full pipeline on a dataset.

    Stages: fit the normalizer, expand, optionally train the autoencoder
    on the expanded features and freeze its encoder, then train the
    output layer with the delta rule over per-instance updates in seeded
    shuffle order.  Only the output weights change during the final
    stage.  Deterministic for fixed seeds.
    """
    mode = LabelMode(mode)
    if data.n_instances == 0:
        raise DataError("cannot train on an empty dataset")
    if mode is LabelMode.SINGLE_LABEL and np.any(data.labels.sum(axis=1) != 1.0):
        raise DataError("single-label training requires exactly one positive label per row")

    norm = fit_normalizer(data.features)
    expanded = expand(apply_normalizer(data.features, norm), expansion)
    encoder = None
    hidden = expanded
    if use_autoencoder:
        encoder = train_autoencoder(expanded, cfg.ae)
        hidden = encode(expanded, encoder)
    w, b = _fit_output_layer(hidden, data.labels, cfg)
    return AeMlFlannModel(
        norm=norm,
        expansion=expansion,
        encoder=encoder,
        out_w=w,
        out_b=b,
        mode=mode,
        threshold=threshold,
    )


def predict_scores(model: AeMlFlannModel, features: np.ndarray) -> np.ndarray:
    """Per-instance classification scores in (0, 1), shape N x C."""
    x = as_matrix(features)
    if x.shape[1] != model.input_width:
        raise ShapeError(
            f"feature width {x.shape[1]} != model input width {model.input_width}"
        )
    a = expand(apply_normalizer(x, model.norm), model.expansion)
    if model.encoder is not None:
        a = encode(a, model.encoder)
    return apply_activation(a @ model.out_w + model.out_b, model.out_act)


def labels_from_scores(scores: np.ndarray, threshold: float) -> np.ndarray:
    """Hard labels: 1 where score >= threshold (a zero row is a valid output)."""
    return (np.asarray(scores) >= threshold).astype(np.float64)


def predict_labels(model: AeMlFlannModel, features: np.ndarray) -> np.ndarray:
    if model.mode is not LabelMode.MULTI_LABEL:
        raise ModeError("predict_labels requires a multi-label model")
    return labels_from_scores(predict_scores(model, features), model.threshold)


def predict_class(model: AeMlFlannModel, features: np.ndarray) -> np.ndarray:
    """Argmax class per instance; score ties go to the lowest class index."""
    if model.mode is not LabelMode.SINGLE_LABEL:
        raise ModeError("predict_class requires a single-label model")
    return np.argmax(predict_scores(model, features), axis=1).astype(np.int64)


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------


def _encoder_payload(params: AutoencoderParams | None):
    if params is None:
        return None
    return {
        "w1": params.w1.tolist(),
        "b1": params.b1.tolist(),
        "w2": params.w2.tolist(),
        "b2": params.b2.tolist(),
        "act_encode": params.act_encode.value,
        "act_decode": params.act_decode.value,
    }


def save_model(model: AeMlFlannModel, path) -> None:
    """Write the model as versioned JSON; floats round-trip bit-exactly."""
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "mode": model.mode.value,
        "threshold": model.threshold,
        "normalization": {
            "minimum": model.norm.minimum.tolist(),
            "maximum": model.norm.maximum.tolist(),
            "mean": model.norm.mean.tolist(),
        },
        "expansion": {"p": model.expansion.p, "basis": model.expansion.basis},
        "encoder": _encoder_payload(model.encoder),
        "output": {
            "w": model.out_w.tolist(),
            "b": model.out_b.tolist(),
            "act": model.out_act.value,
        },
    }
    Path(path).write_text(json.dumps(payload))


def load_model(path) -> AeMlFlannModel:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: not a valid model file: {exc}") from exc
    try:
        if payload["format"] != MODEL_FORMAT:
            raise ModelFormatError(f"{path}: unknown format {payload['format']!r}")
        if payload["version"] != MODEL_VERSION:
            raise ModelFormatError(f"{path}: unsupported version {payload['version']!r}")
        norm_raw = payload["normalization"]
        minimum = np.asarray(norm_raw["minimum"], dtype=np.float64)
        maximum = np.asarray(norm_raw["maximum"], dtype=np.float64)
        norm = NormalizationParams(
            minimum, maximum, np.asarray(norm_raw["mean"], dtype=np.float64), maximum == minimum
        )
        enc_raw = payload["encoder"]
        encoder = None
        if enc_raw is not None:
            encoder = AutoencoderParams(
                w1=np.asarray(enc_raw["w1"], dtype=np.float64),
                b1=np.asarray(enc_raw["b1"], dtype=np.float64),
                w2=np.asarray(enc_raw["w2"], dtype=np.float64),
                b2=np.asarray(enc_raw["b2"], dtype=np.float64),
                act_encode=Activation(enc_raw["act_encode"]),
                act_decode=Activation(enc_raw["act_decode"]),
            )
        return AeMlFlannModel(
            norm=norm,
            expansion=ExpansionConfig(
                p=payload["expansion"]["p"], basis=payload["expansion"]["basis"]
            ),
            encoder=encoder,
            out_w=np.asarray(payload["output"]["w"], dtype=np.float64),
            out_b=np.asarray(payload["output"]["b"], dtype=np.float64),
            out_act=Activation(payload["output"]["act"]),
            mode=LabelMode(payload["mode"]),
            threshold=payload["threshold"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model file: {exc}") from exc
