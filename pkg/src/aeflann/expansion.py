"""Trigonometric functional expansion of normalized features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, ShapeError

TRIGONOMETRIC = "trigonometric"


@dataclass(frozen=True)
class ExpansionConfig:
    """How many basis terms each feature expands into.

    A feature x in [0, 1] becomes the p-term block
    ``[x, sin(pi x), cos(pi x), sin(2 pi x), cos(2 pi x), ...]``.
    p must be odd so the sin/cos harmonics come in complete pairs after
    the identity term; p = 1 leaves features unchanged.
    """

    p: int = 5
    basis: str = TRIGONOMETRIC

    def __post_init__(self) -> None:
        if self.p < 1 or self.p % 2 == 0:
            raise ConfigError(f"expansion p must be odd and >= 1, got {self.p}")
        if self.basis != TRIGONOMETRIC:
            raise ConfigError(f"unsupported expansion basis {self.basis!r}")


def expand(features: np.ndarray, config: ExpansionConfig) -> np.ndarray:
    """Widen an N x d matrix of [0, 1] features to N x (d * p).

    Blocks are laid out in original feature order: columns
    ``j*p .. j*p + p - 1`` depend only on feature j.  Entries outside
    [0, 1] are rejected, since they indicate a missing normalization
    step upstream.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"expected a 2-D feature matrix, got ndim={x.ndim}")
    if not np.all((x >= 0.0) & (x <= 1.0)):
        raise DomainError("feature entries must lie in [0, 1]; normalize first")
    n, d = x.shape
    p = config.p
    out = np.empty((n, d * p), dtype=np.float64)
    out[:, 0::p] = x
    for m in range(1, (p - 1) // 2 + 1):
        out[:, 2 * m - 1 :: p] = np.sin(m * np.pi * x)
        out[:, 2 * m :: p] = np.cos(m * np.pi * x)
    return out
