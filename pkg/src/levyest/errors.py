"""Exception types shared across the package."""


class LevyEstError(Exception):
    """Base class for all package errors."""


class ParameterError(LevyEstError, ValueError):
    """A model or estimator parameter is outside its admissible range."""


class InputError(LevyEstError, ValueError):
    """Malformed data handed to an estimator (empty sample, grid mismatch, ...)."""


class DomainError(LevyEstError, ValueError):
    """A function was evaluated outside its domain."""


class UnsupportedModelError(LevyEstError, NotImplementedError):
    """The requested operation is not available for this model."""
