"""
Custom exceptions for the lqrecover library.
"""

from typing import Any, Optional


class LqRecoverError(Exception):
    """Base exception for all lqrecover errors."""
    pass

class ConfigurationError(LqRecoverError, ValueError):
    """Raised when a parameter record is out of its admissible range."""
    pass

class DataShapeError(LqRecoverError, ValueError):
    """Raised when arrays have inconsistent dimensions or non-finite entries."""
    pass

class CombinatorialBudgetError(LqRecoverError):
    """Raised when an exhaustive enumeration would exceed its subset budget."""

    def __init__(self, message: str, required: int = 0, budget: int = 0):
        super().__init__(message)
        self.required = required
        self.budget = budget

class SolverError(LqRecoverError):
    """Raised when a solver cannot produce an acceptable iterate."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial

class DivergenceError(SolverError):
    """Raised when a forced step size makes the objective blow up."""
    pass

class MatrixFileError(LqRecoverError):
    """Raised when a matrix file cannot be read or is inconsistent."""
    pass
