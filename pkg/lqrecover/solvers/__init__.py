"""
Estimators for the regularized and constrained ℓq problems.
"""

from lqrecover.solvers.base import (
    SolveResult,
    basic_inequality_gap,
    lipschitz_constant,
    objective_value,
    stationarity_residual,
)
from lqrecover.solvers.exhaustive import global_solve_tiny
from lqrecover.solvers.proximal import prox_gradient_solve
from lqrecover.solvers.reweighted import irl1_constrained_solve


__all__ = [
    "SolveResult",
    "prox_gradient_solve",
    "irl1_constrained_solve",
    "global_solve_tiny",
    "objective_value",
    "stationarity_residual",
    "basic_inequality_gap",
    "lipschitz_constant",
]
