"""
Error types raised by the scattering library.

Commands translate them into exit codes: InvalidArgumentError -> 2,
NumericError (and ConvergenceError) -> 3.
"""


class ScatteringError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(ScatteringError, ValueError):
    """An input violates an operation's precondition."""


class NumericError(ScatteringError, ArithmeticError):
    """A numerical procedure failed; carries whatever it managed to compute."""

    def __init__(self, message, estimate=None, error=None, condition=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.condition = condition


class ConvergenceError(NumericError):
    """Residual or truncation check did not reach the requested tolerance."""
