"""
Exception hierarchy for the Transverse Solver.
Every failure carries enough context to point at the offending grid point or path value.
"""

from typing import Optional, Sequence


class SolverError(Exception):
    """Base class for all solver-side failures."""
    pass


class ArgumentError(SolverError, ValueError):
    """Raised when an argument is out of its documented range."""
    pass


class DimensionError(ArgumentError):
    """Raised when an operation is undefined in the requested dimension."""
    pass


class DomainError(SolverError):
    """
    Raised when an eigenvalue tuple leaves the cone of an operator.

    Attributes:
        spectrum: The offending eigenvalue tuple (if known)
        failing_j: First index j with sigma_j <= 0 (if known)
        worst_index: Grid multi-index of the worst point (field inputs only)
    """

    def __init__(
        self,
        message: str,
        spectrum: Optional[Sequence[float]] = None,
        failing_j: Optional[int] = None,
        worst_index: Optional[tuple] = None,
    ):
        super().__init__(message)
        self.spectrum = None if spectrum is None else tuple(float(x) for x in spectrum)
        self.failing_j = failing_j
        self.worst_index = worst_index


class AdmissibilityError(DomainError):
    """Raised when a candidate u makes the equation non-elliptic somewhere."""
    pass


class MetricError(SolverError):
    """Raised when a metric is not positive definite."""

    def __init__(self, message: str, worst_index: Optional[tuple] = None, min_eigenvalue: Optional[float] = None):
        super().__init__(message)
        self.worst_index = worst_index
        self.min_eigenvalue = min_eigenvalue


class PositivityError(SolverError):
    """Raised when a form expected to be (k-)positive is not."""

    def __init__(self, message: str, margin: Optional[float] = None):
        super().__init__(message)
        self.margin = margin


class SubsolutionError(SolverError):
    """Raised when a solve is attempted without a certified subsolution."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class StagnationError(SolverError):
    """Raised when Newton's line search or iteration budget is exhausted."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class ContinuationError(SolverError):
    """Raised when the continuation t-step underflows."""

    def __init__(self, message: str, last_good_t: float = 0.0, run=None):
        super().__init__(message)
        self.last_good_t = last_good_t
        self.run = run


class FlowAbort(SolverError):
    """Raised when the parabolic flow leaves the cone."""

    def __init__(self, message: str, step: int, trajectory=None):
        super().__init__(message)
        self.step = step
        self.trajectory = trajectory
