"""
K-fold cross-validation of the regularization weight λ.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import numpy.typing as npt

from lqrecover.config import SolverOptions
from lqrecover.core import check_problem
from lqrecover.exceptions import ConfigurationError
from lqrecover.penalties import PenaltySpec
from lqrecover.solvers import prox_gradient_solve


logger = logging.getLogger(__name__)


@dataclass
class CrossValidationResult:
    """Chosen λ with the mean held-out error of every grid point (grid order)."""
    lam: float
    grid: List[float]
    errors: List[float]


def default_lambda_grid(X: npt.ArrayLike, y: npt.ArrayLike, num: int = 20, ratio: float = 1e-3) -> List[float]:
    """
    Log-spaced grid from λ_max = ‖Xᵀy‖∞/m (the smallest λ at which the
    ℓ1 solution is zero) down to ratio·λ_max, largest first.
    """
    X, y = check_problem(X, y)
    lam_max = float(np.max(np.abs(X.T @ y))) / X.shape[0]
    if lam_max <= 0:
        lam_max = 1.0
    return [float(v) for v in np.geomspace(lam_max, lam_max * ratio, num)]


def fold_indices(m: int, folds: int, seed: int) -> List[np.ndarray]:
    """Shuffle the rows once and cut them into ``folds`` contiguous blocks."""
    if folds < 2:
        raise ConfigurationError(f"folds must be at least 2, got {folds}")
    if m < folds:
        raise ConfigurationError(f"Cannot split {m} rows into {folds} nonempty folds")
    perm = np.random.default_rng(seed).permutation(m)
    return [np.sort(block) for block in np.array_split(perm, folds)]


def cross_validate_lambda(
    X: npt.ArrayLike,
    y: npt.ArrayLike,
    pen: PenaltySpec,
    lambda_grid: Optional[Sequence[float]] = None,
    folds: int = 10,
    seed: int = 0,
    opts: Optional[SolverOptions] = None,
) -> CrossValidationResult:
    """
    Pick λ by minimizing the mean held-out error (1/2m')‖y' − X'β̂‖² over folds.

    Within a fold the grid is solved from the largest λ down, each solve warm
    started at the previous one. Ties go to the larger λ.

    Args:
        X: Design matrix.
        y: Observation.
        pen: Penalty template; its λ is replaced by each grid value.
        lambda_grid: Candidate values; ``default_lambda_grid`` when None.
        folds: Number of folds, ≥ 2 and ≤ m.
        seed: Seed of the row shuffle.
        opts: Solver controls for every fit.

    Returns:
        CrossValidationResult.

    Raises:
        ConfigurationError: On an empty grid or a degenerate fold split.
    """
    X, y = check_problem(X, y)
    m, n = X.shape
    grid = default_lambda_grid(X, y) if lambda_grid is None else [float(v) for v in lambda_grid]
    if not grid:
        raise ConfigurationError("lambda_grid must not be empty")
    blocks = fold_indices(m, folds, seed)
    order = np.argsort(grid, kind="stable")[::-1]

    totals = np.zeros(len(grid))
    for held_out in blocks:
        train = np.setdiff1d(np.arange(m), held_out, assume_unique=True)
        X_tr, y_tr = X[train], y[train]
        X_te, y_te = X[held_out], y[held_out]
        beta = np.zeros(n)
        for k in order:
            beta = prox_gradient_solve(X_tr, y_tr, pen.with_lambda(grid[k]), opts, beta0=beta).beta_hat
            r = y_te - X_te @ beta
            totals[k] += 0.5 * float(r @ r) / held_out.size

    errors = totals / len(blocks)
    best = float(np.min(errors))
    tied = np.flatnonzero(errors <= best * (1.0 + 1e-12) + np.finfo(float).tiny)
    lam = max(grid[k] for k in tied)
    logger.debug("cross-validation over %d values picked lambda=%.4e (error %.4e)", len(grid), lam, best)
    return CrossValidationResult(lam=lam, grid=grid, errors=[float(v) for v in errors])
