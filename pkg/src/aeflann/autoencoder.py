"""Under-complete autoencoder trained by online backpropagation on MSE.

The encoder half (w1, b1) is what the classifier keeps: after training,
``encode`` maps the expanded feature space down to a narrower learned
representation.  Shapes follow the row-vector convention used package
wide: encoding is ``act(x @ w1 + b1)`` for row x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DivergenceError, ShapeError
from .linalg import (
    Activation,
    SeededRng,
    activation_prime_from_output,
    apply_activation,
    as_matrix,
    check_finite,
    uniform_init,
)


@dataclass
class AutoencoderParams:
    """Trained weights: encoder (w1, b1) and decoder (w2, b2).

    The hidden width must be strictly below the input width, and the
    decoder mirrors the encoder's shape.  ``mse_history`` holds the
    whole-input reconstruction MSE per epoch (index 0 = at
    initialization) when produced by :func:`train_autoencoder`.
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    act_encode: Activation = Activation.SIGMOID
    act_decode: Activation = Activation.SIGMOID
    mse_history: list[float] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.w1 = as_matrix(self.w1)
        self.w2 = as_matrix(self.w2)
        self.b1 = np.ascontiguousarray(self.b1, dtype=np.float64)
        self.b2 = np.ascontiguousarray(self.b2, dtype=np.float64)
        self.act_encode = Activation(self.act_encode)
        self.act_decode = Activation(self.act_decode)
        d_in, d_hidden = self.w1.shape
        if d_hidden >= d_in:
            raise ConfigError(
                f"autoencoder must be under-complete: hidden {d_hidden} >= input {d_in}"
            )
        if self.w2.shape != (d_hidden, d_in):
            raise ShapeError(f"decoder shape {self.w2.shape} != {(d_hidden, d_in)}")
        if self.b1.shape != (d_hidden,) or self.b2.shape != (d_in,):
            raise ShapeError("bias shapes do not match the weight matrices")

    @property
    def input_width(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden_width(self) -> int:
        return self.w1.shape[1]


@dataclass
class AeTrainConfig:
    """Hyperparameters for autoencoder training.

    ``hidden_fraction`` sets the bottleneck width as
    ``max(1, ceil(hidden_fraction * d_in))``.
    """

    learning_rate: float = 0.1
    epochs: int = 300
    hidden_fraction: float = 0.2
    init_scale: float = 0.5
    seed: int = 0
    act_encode: Activation = Activation.SIGMOID
    act_decode: Activation = Activation.SIGMOID

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if not 0.0 < self.hidden_fraction < 1.0:
            raise ConfigError(
                f"hidden_fraction must lie strictly in (0, 1), got {self.hidden_fraction}"
            )
        if self.init_scale <= 0:
            raise ConfigError(f"init_scale must be positive, got {self.init_scale}")
        self.act_encode = Activation(self.act_encode)
        self.act_decode = Activation(self.act_decode)


def hidden_width_for(d_in: int, hidden_fraction: float) -> int:
    width = max(1, math.ceil(hidden_fraction * d_in))
    if width >= d_in:
        raise ConfigError(
            f"hidden_fraction {hidden_fraction} gives width {width}, not below input {d_in}"
        )
    return width


def encode(x: np.ndarray, params: AutoencoderParams) -> np.ndarray:
    x = as_matrix(x)
    if x.shape[1] != params.input_width:
        raise ShapeError(f"input width {x.shape[1]} != encoder width {params.input_width}")
    return apply_activation(x @ params.w1 + params.b1, params.act_encode)


def decode(a: np.ndarray, params: AutoencoderParams) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[1] != params.hidden_width:
        raise ShapeError(f"code width {a.shape[1]} != hidden width {params.hidden_width}")
    return apply_activation(a @ params.w2 + params.b2, params.act_decode)


def reconstruction_mse(x: np.ndarray, params: AutoencoderParams) -> float:
    """Mean over all N * d_in entries of the squared reconstruction error."""
    x = as_matrix(x)
    diff = decode(encode(x, params), params) - x
    return float(np.mean(diff * diff))


def reconstruction_gradients(
    x: np.ndarray, params: AutoencoderParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`reconstruction_mse` w.r.t. (w1, b1, w2, b2).

    Used both by the online trainer (one row at a time) and by gradient
    checks against finite differences.
    """
    x = as_matrix(x)
    a = encode(x, params)
    xr = decode(a, params)
    n, d_in = x.shape
    delta2 = (2.0 / (n * d_in)) * (xr - x) * activation_prime_from_output(xr, params.act_decode)
    gw2 = a.T @ delta2
    gb2 = delta2.sum(axis=0)
    delta1 = (delta2 @ params.w2.T) * activation_prime_from_output(a, params.act_encode)
    gw1 = x.T @ delta1
    gb1 = delta1.sum(axis=0)
    return gw1, gb1, gw2, gb2


def train_autoencoder(x: np.ndarray, config: AeTrainConfig) -> AutoencoderParams:
    """Fit an under-complete autoencoder with per-sample gradient descent.

    Samples are visited in a fresh seeded shuffle order each epoch; the
    run is bit-reproducible for a given seed.  Raises
    :class:`DivergenceError` if weights or the epoch MSE stop being
    finite.
    """
    x = as_matrix(x)
    check_finite(x, "training data")
    n, d_in = x.shape
    if n < 1:
        raise DataError("autoencoder training needs at least one row")
    if d_in < 2:
        raise ConfigError("under-complete autoencoder needs at least 2 input columns")
    d_hidden = hidden_width_for(d_in, config.hidden_fraction)

    rng = SeededRng(config.seed)
    scale = config.init_scale
    params = AutoencoderParams(
        w1=uniform_init(d_in, d_hidden, scale, rng),
        b1=rng.uniform(-scale, scale, d_hidden),
        w2=uniform_init(d_hidden, d_in, scale, rng),
        b2=rng.uniform(-scale, scale, d_in),
        act_encode=config.act_encode,
        act_decode=config.act_decode,
    )
    history = [reconstruction_mse(x, params)]
    lr = config.learning_rate
    # overflow in a diverging run is caught by the per-epoch check below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, config.epochs + 1):
            for i in rng.permutation(n):
                gw1, gb1, gw2, gb2 = reconstruction_gradients(x[i : i + 1], params)
                params.w1 -= lr * gw1
                params.b1 -= lr * gb1
                params.w2 -= lr * gw2
                params.b2 -= lr * gb2
            finite = all(
                np.all(np.isfinite(arr)) for arr in (params.w1, params.b1, params.w2, params.b2)
            )
            if not finite:
                raise DivergenceError(f"autoencoder training diverged at epoch {epoch}")
            mse = reconstruction_mse(x, params)
            if not np.isfinite(mse):
                raise DivergenceError(f"autoencoder training diverged at epoch {epoch}")
            history.append(mse)
    params.mse_history = history
    return params
