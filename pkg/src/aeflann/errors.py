"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: every subclass of
:class:`AeflannError` except :class:`DivergenceError` means a user,
configuration, or data problem (exit 2); :class:`DivergenceError` means
training blew up numerically (exit 3).
"""


class AeflannError(Exception):
    """Base class for all package errors."""


class ShapeError(AeflannError):
    """Operand dimensions do not conform."""


class DomainError(AeflannError):
    """Values fall outside the operation's required domain."""


class ConfigError(AeflannError):
    """Invalid or inconsistent configuration."""


class DataError(AeflannError):
    """Dataset content violates a contract (e.g. a non-binary label)."""


class ParseError(AeflannError):
    """Malformed input file; the message names the offending line."""


class SchemaError(AeflannError):
    """Companion dataset files disagree with each other."""


class ModeError(AeflannError):
    """Operation called on a model in the wrong label mode."""


class ModelFormatError(AeflannError):
    """Model file is corrupt, truncated, or has an unknown version."""


class DivergenceError(AeflannError):
    """Training produced non-finite values; the message names the epoch."""


class DegenerateStatisticError(AeflannError):
    """Statistic undefined for the given inputs (e.g. zero variance)."""
