"""Semantic exceptions shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CompatibilityError(ValueError):
    """Neumann data and load do not balance; carries the residual."""

    def __init__(self, residual, message=None):
        self.residual = residual
        super().__init__(message or f"compatibility residual {residual:.3e} exceeds tolerance")


class PositivityError(ValueError):
    """A positivity hypothesis (positive total load / positive solution) is violated."""


class DegenerateConditionError(ValueError):
    """A boundary datum vanishes, so the trace-ratio normalization is undefined."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance within its iteration cap."""
