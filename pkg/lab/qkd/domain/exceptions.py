"""
Domain exceptions.

Every error raised by the laboratory derives from QkdError, which is
itself a ValueError so callers that guard value-object construction
with `except ValueError` keep working.
"""


class QkdError(ValueError):
    """Base class for all laboratory errors."""


class GateError(QkdError):
    """Unknown gate name or wrong angle usage."""


class StateError(QkdError):
    """Invalid density matrix, distribution or qubit index."""


class ChannelError(QkdError):
    """Invalid noise channel kind, strength or Kraus set."""


class ProtocolError(QkdError):
    """Invalid protocol parameters or transcript."""


class LearningError(QkdError):
    """Invalid learner, reward or PQC parameters."""


class OptimizationError(QkdError):
    """Optimizer received a non-finite objective or gradient."""


class MetricError(QkdError):
    """Metric undefined for the given inputs."""


class ConfigError(QkdError):
    """Invalid experiment configuration."""
