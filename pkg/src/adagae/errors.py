"""Exception hierarchy shared by every stage of the pipeline."""


class AdaGAEError(Exception):
    """Base class for all package errors."""


class InvalidInputError(AdaGAEError, ValueError):
    """Malformed or non-finite input data."""


class ConfigError(AdaGAEError, ValueError):
    """A parameter or configuration value violates a precondition."""


class NumericError(AdaGAEError, ArithmeticError):
    """A computation produced a non-finite or otherwise unusable value."""


class DegenerateGraphError(NumericError):
    """A graph has a zero-degree node and cannot be normalized."""


class DivergenceError(NumericError):
    """Training produced a non-finite loss."""

    def __init__(self, iteration, lr, message=None):
        self.iteration = iteration
        self.lr = lr
        super().__init__(message or f"loss became non-finite at iteration {iteration} (lr={lr:g})")
