"""Exception types raised across the package."""


class FimAllocError(Exception):
    """Base class for all package errors."""


class DomainError(FimAllocError, ValueError):
    """An input lies outside the domain of the operation (non-finite, nonpositive, ...)."""


class SingularMatrixError(FimAllocError, ValueError):
    """A matrix that must be inverted is singular within the rank tolerance."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class RankError(FimAllocError, ValueError):
    """A channel matrix does not have full row rank."""


class IntegrationError(FimAllocError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class DegenerateProblemError(FimAllocError, ValueError):
    """The allocation problem has no meaningful solution for this input."""


class ObjectiveEvaluationError(FimAllocError, ValueError):
    """An optimizer objective returned a non-finite value at a feasible point."""

    def __init__(self, message, point):
        super().__init__(message)
        self.point = point


class ModelFileError(FimAllocError, ValueError):
    """A model file is malformed; carries the offending field and line when known."""

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line
