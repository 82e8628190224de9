"""Exception hierarchy shared across the package."""


class ChainError(Exception):
    """Base class for all package errors."""


class ParameterError(ChainError, ValueError):
    """Invalid physical or numerical parameter."""


class UnsupportedError(ParameterError):
    """Operation is not defined for the given parameters (e.g. odd chain length)."""


class NumericalValidityError(ChainError, ArithmeticError):
    """A numerical result violates its validity contract."""


class IntegrationError(NumericalValidityError):
    """Time integration could not reach the requested accuracy."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class MeasurementFailure(NumericalValidityError):
    """Post-selected measurement outcome has vanishing probability."""
