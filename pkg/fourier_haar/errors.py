"""Exception hierarchy for the fourier_haar package."""

from typing import Optional


class FourierHaarError(Exception):
    """Base class for all errors raised by this package."""


class SizeError(FourierHaarError, ValueError):
    """A vector or matrix has a dimension that is not 2**r or does not match."""


class ParameterError(FourierHaarError, ValueError):
    """A numerical parameter lies outside its admissible range."""


class ConfigError(FourierHaarError, ValueError):
    """An experiment configuration cannot be loaded or is inconsistent."""


class CapacityError(FourierHaarError, RuntimeError):
    """A dense or exhaustive computation would exceed the configured limits."""


class ConvergenceError(FourierHaarError, ArithmeticError):
    """An iterative method stopped before meeting its tolerance."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual
