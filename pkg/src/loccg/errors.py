"""Exception types shared across the package."""


class LoccgError(Exception):
    pass


class DomainError(LoccgError, ValueError):
    """Parameters outside the domain an operation accepts."""


class CapacityError(LoccgError):
    """An exhaustive enumeration would exceed its budget."""


class ConvergenceError(LoccgError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ExtractionError(LoccgError):
    """The Gram matrix is not (numerically) rank two."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class ConsistencyError(LoccgError):
    """Two independent routes to the same quantity disagree."""
