"""Exception types shared across the package."""


class DataValidationError(ValueError):
    """Raised when input data violates a documented precondition."""


class NumericalError(RuntimeError):
    """Raised when a numerical routine cannot produce a reliable result."""
