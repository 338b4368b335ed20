"""
Result type and objective helpers shared by the estimators.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import numpy.typing as npt

from lqrecover.core import as_vector, check_problem, lq_power
from lqrecover.penalties import PenaltySpec, build_penalty


@dataclass
class SolveResult:
    """Outcome of one solve.

    Attributes:
        beta_hat: Estimated coefficients.
        objective_trace: Objective value after every iteration, starting
            with the value at the initial point.
        iterations: Iterations performed.
        converged: Whether the stopping rule was met before the cap.
        stationarity_residual: ‖β − prox(β − step·∇f(β))‖₂ for the
            regularized solvers; the last outer-iterate change for the
            reweighted solver.
        info: Solver-specific extras (step size, λ, gaps, ...).
    """
    beta_hat: npt.NDArray[np.float64]
    objective_trace: List[float]
    iterations: int
    converged: bool
    stationarity_residual: float
    info: Dict[str, Any] = field(default_factory=dict)

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]

    def max_objective_increase(self) -> float:
        """Largest single-step increase of the objective trace (0 when monotone)."""
        if len(self.objective_trace) < 2:
            return 0.0
        return float(max(0.0, np.max(np.diff(self.objective_trace))))

    def to_dict(self, trace_tail: int = 10) -> Dict[str, Any]:
        return {
            "beta_hat": [float(v) for v in self.beta_hat],
            "objective_trace_tail": [float(v) for v in self.objective_trace[-trace_tail:]],
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "stationarity_residual": float(self.stationarity_residual),
            **{k: v for k, v in self.info.items() if isinstance(v, (int, float, str, bool))},
        }


def lipschitz_constant(X: npt.NDArray[np.float64]) -> float:
    """L = σ_max(XᵀX)/m, the gradient Lipschitz constant of (1/2m)‖y − Xβ‖²."""
    return float(np.linalg.norm(X, 2) ** 2 / X.shape[0])


def objective_value(X: npt.ArrayLike, y: npt.ArrayLike, beta: npt.ArrayLike, pen: PenaltySpec) -> float:
    """(1/2m)‖y − Xβ‖² + λΣρ(β_i)."""
    X, y = check_problem(X, y)
    beta = as_vector(beta, "beta", X.shape[1])
    r = X @ beta - y
    return float(0.5 * (r @ r) / X.shape[0] + pen.lam * build_penalty(pen).value(beta))


def stationarity_residual(
    X: npt.ArrayLike, y: npt.ArrayLike, beta: npt.ArrayLike, pen: PenaltySpec, step: Optional[float] = None
) -> float:
    """‖β − prox_{step·λ}(β − step·∇f(β))‖₂, with step = 1/L by default."""
    X, y = check_problem(X, y)
    beta = as_vector(beta, "beta", X.shape[1])
    m = X.shape[0]
    if step is None:
        lipschitz = lipschitz_constant(X)
        step = 1.0 / lipschitz if lipschitz > 0 else 1.0
    grad = X.T @ (X @ beta - y) / m
    moved = build_penalty(pen).prox(beta - step * grad, step * pen.lam)
    return float(np.linalg.norm(moved - beta))


def basic_inequality_gap(
    X: npt.ArrayLike,
    y: npt.ArrayLike,
    beta_hat: npt.ArrayLike,
    beta_star: npt.ArrayLike,
    lam: float,
    q: float,
) -> float:
    """
    Slack of the basic inequality satisfied by any minimizer of the ℓq-regularized problem.

    Returns right − left of
    (1/2m)‖Xβ* − Xβ̂‖² ≤ λ‖β*‖_q^q − λ‖β̂‖_q^q + (1/m)‖β̂ − β*‖₁‖Xᵀe‖∞,
    with e = y − Xβ*. A global minimizer always gives a nonnegative value.
    """
    X, y = check_problem(X, y)
    n = X.shape[1]
    m = X.shape[0]
    beta_hat = as_vector(beta_hat, "beta_hat", n)
    beta_star = as_vector(beta_star, "beta_star", n)
    noise = y - X @ beta_star
    diff = X @ (beta_star - beta_hat)
    left = 0.5 * (diff @ diff) / m
    right = (
        lam * lq_power(beta_star, q)
        - lam * lq_power(beta_hat, q)
        + np.sum(np.abs(beta_hat - beta_star)) * np.max(np.abs(X.T @ noise)) / m
    )
    return float(right - left)
