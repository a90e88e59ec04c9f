"""Dense float64 matrices, activation functions, and seeded randomness.

Matrices everywhere in this package are 2-D C-contiguous ``float64``
numpy arrays (row-major).  All helpers here keep entries finite: the
sigmoid clamps its pre-activation so ``exp`` cannot overflow, and both
sigmoid and tanh are nudged off their asymptotes so outputs stay
strictly inside (0, 1) and (-1, 1) even for huge inputs.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import DomainError, ShapeError

# exp() is finite for |z| <= 500; beyond that the output is saturated anyway.
SIGMOID_CLAMP = 500.0

# Largest double strictly below 1.0.
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"
    IDENTITY = "identity"


class SeededRng:
    """Deterministic random stream owned by a single consumer.

    Backed by numpy's PCG64, a fixed and fully specified generator: the
    same 64-bit seed reproduces the same draw sequence on every platform.
    """

    def __init__(self, seed: int) -> None:
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def uniform(self, low: float, high: float, shape) -> np.ndarray:
        return self._gen.uniform(low, high, shape)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)


def derive_seed(seed: int, *stream: int) -> int:
    """Derive an independent child seed from a root seed and stream ids.

    Used to hand every fold / training stage its own reproducible stream
    without the streams overlapping.
    """
    ss = np.random.SeedSequence([int(seed)] + [int(s) for s in stream])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def as_matrix(values) -> np.ndarray:
    """Coerce input to a 2-D C-order float64 matrix."""
    m = np.ascontiguousarray(values, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    return m


def check_finite(m: np.ndarray, what: str = "matrix") -> None:
    if not np.all(np.isfinite(m)):
        raise DomainError(f"{what} contains non-finite entries")


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with explicit conformance checking."""
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul needs 2-D operands, got ndim {a.ndim} and {b.ndim}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} x {b.shape}")
    return a @ b


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, -SIGMOID_CLAMP, SIGMOID_CLAMP)
    out = 1.0 / (1.0 + np.exp(-z))
    # 1/(1+exp(-z)) rounds to exactly 1.0 for z >~ 37; keep the range open.
    return np.minimum(out, _BELOW_ONE)


def apply_activation(m: np.ndarray, kind: Activation) -> np.ndarray:
    """Elementwise activation; shape preserved, output always finite."""
    kind = Activation(kind)
    m = np.asarray(m, dtype=np.float64)
    if kind is Activation.SIGMOID:
        return sigmoid(m)
    if kind is Activation.TANH:
        return np.clip(np.tanh(m), -_BELOW_ONE, _BELOW_ONE)
    if kind is Activation.RELU:
        return np.maximum(m, 0.0)
    return m.copy()


def activation_prime_from_output(y: np.ndarray, kind: Activation) -> np.ndarray:
    """Derivative w.r.t. the pre-activation, expressed from the output value."""
    kind = Activation(kind)
    y = np.asarray(y, dtype=np.float64)
    if kind is Activation.SIGMOID:
        return y * (1.0 - y)
    if kind is Activation.TANH:
        return 1.0 - y * y
    if kind is Activation.RELU:
        return (y > 0.0).astype(np.float64)
    return np.ones_like(y)


def sigmoid_prime_from_output(y: np.ndarray) -> np.ndarray:
    """Elementwise y * (1 - y) for sigmoid outputs y in [0, 1]."""
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)) or np.any(y < 0.0) or np.any(y > 1.0):
        raise DomainError("sigmoid outputs must lie in [0, 1]")
    return y * (1.0 - y)


def uniform_init(rows: int, cols: int, scale: float, rng: SeededRng) -> np.ndarray:
    """Weight matrix with entries drawn uniformly from [-scale, +scale]."""
    if rows <= 0 or cols <= 0:
        raise ShapeError(f"matrix dimensions must be positive, got {rows} x {cols}")
    if scale <= 0:
        raise DomainError(f"scale must be positive, got {scale}")
    return rng.uniform(-scale, scale, (rows, cols))
