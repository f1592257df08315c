"""Exception types shared across the package."""


class SocoError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(SocoError, ValueError):
    """A vector does not have the dimension the operation expects."""


class InvalidArgumentError(SocoError, ValueError):
    """An argument violates a precondition (e.g. W > N, tau <= 0)."""


class UnsupportedCostError(SocoError, TypeError):
    """An operation was requested on a cost family that does not support it."""


class NumericError(SocoError, ArithmeticError):
    """A computed quantity is non-finite."""


class InvalidStepSizeError(SocoError, ValueError):
    """The configured step size violates a positivity condition.

    Carries the name of the violated condition in ``condition``.
    """

    def __init__(self, condition, value):
        self.condition = condition
        self.value = value
        super().__init__(f"step size violates {condition} > 0 (got {condition} = {value:g})")


class ConvergenceError(SocoError, RuntimeError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message, iterations=None, residuals=None):
        self.iterations = iterations
        self.residuals = residuals
        super().__init__(message)
