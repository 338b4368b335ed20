"""
Exhaustive global solver for tiny regularized problems.

Every support S ⊆ {1..n} is visited; on each one a batch of starts runs exact
coordinate descent with the other coordinates pinned at zero. The restricted
problems are at most n-dimensional, so the best candidate over all supports
and starts is the global minimizer for the sizes this solver accepts.
"""

import itertools
import logging
from typing import Optional

import numpy as np
import numpy.typing as npt

from lqrecover.config import SolverOptions
from lqrecover.core import check_problem
from lqrecover.exceptions import ConfigurationError
from lqrecover.penalties import PenaltySpec, build_penalty
from lqrecover.solvers.base import SolveResult, stationarity_residual


logger = logging.getLogger(__name__)

DEFAULT_MAX_N = 12


def _support_masks(n: int) -> np.ndarray:
    """All 2^n supports as boolean rows, sparsest first."""
    masks = [np.zeros(n, dtype=bool)]
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(n), size):
            row = np.zeros(n, dtype=bool)
            row[list(combo)] = True
            masks.append(row)
    return np.array(masks)


def _starting_points(X: np.ndarray, y: np.ndarray, masks: np.ndarray, num_starts: int, seed: int):
    """Least-squares and random starts for every nonempty support, plus the zero vector."""
    rng = np.random.default_rng(seed)
    n = X.shape[1]
    starts = [np.zeros(n)]
    start_masks = [masks[0]]
    for mask in masks[1:]:
        cols = np.flatnonzero(mask)
        ls = np.zeros(n)
        ls[cols] = np.linalg.lstsq(X[:, cols], y, rcond=None)[0]
        starts.append(ls)
        start_masks.append(mask)
        scale = max(1.0, float(np.max(np.abs(ls))))
        for _ in range(num_starts):
            b = np.zeros(n)
            b[cols] = scale * rng.standard_normal(cols.size)
            starts.append(b)
            start_masks.append(mask)
    return np.array(starts), np.array(start_masks)


def global_solve_tiny(
    X: npt.ArrayLike,
    y: npt.ArrayLike,
    lam: float,
    q: float,
    max_n: int = DEFAULT_MAX_N,
    opts: Optional[SolverOptions] = None,
) -> SolveResult:
    """
    Global minimizer of (1/2m)‖y − Xβ‖² + λ‖β‖_q^q by support enumeration.

    Args:
        X: Design matrix with at most ``max_n`` columns.
        y: Observation.
        lam: Regularization weight, > 0.
        q: 0 (ℓ0), 1 (ℓ1) or an exponent in (0, 1).
        max_n: Largest accepted number of columns.
        opts: ``max_iters`` caps coordinate sweeps, ``tol`` is the sweep
            change at which a start stops, ``num_starts`` and ``seed`` control
            the random starts per support.

    Returns:
        SolveResult of the best candidate; the trace is that candidate's
        objective per sweep and ``info["supports"]`` the number visited.

    Raises:
        ConfigurationError: If n exceeds max_n or the penalty is invalid.
    """
    X, y = check_problem(X, y)
    m, n = X.shape
    if n > max_n:
        raise ConfigurationError(f"global_solve_tiny enumerates 2^n supports; n={n} exceeds max_n={max_n}")
    opts = opts or SolverOptions()
    pen = PenaltySpec.for_q(q, lam)
    penalty = build_penalty(pen)

    masks = _support_masks(n)
    B, M = _starting_points(X, y, masks, opts.num_starts, opts.seed)
    col_sq = np.sum(X * X, axis=0)
    M &= col_sq > 0
    B = np.where(M, B, 0.0)
    R = B @ X.T - y

    def objectives(B: np.ndarray, R: np.ndarray) -> np.ndarray:
        return 0.5 * np.sum(R * R, axis=1) / m + lam * np.sum(penalty.rho(B), axis=1)

    history = [objectives(B, R)]
    active = np.ones(B.shape[0], dtype=bool)
    last_change = np.full(B.shape[0], np.inf)

    sweeps = 0
    for sweeps in range(1, opts.max_iters + 1):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            sweeps -= 1
            break
        B_old = B[rows].copy()
        for j in range(n):
            if col_sq[j] == 0:
                continue
            x_j = X[:, j]
            current = B[rows, j]
            z = current - (R[rows] @ x_j) / col_sq[j]
            new = penalty.prox(z, lam * m / col_sq[j])
            new = np.where(M[rows, j], new, 0.0)
            R[rows] += np.outer(new - current, x_j)
            B[rows, j] = new
        change = np.linalg.norm(B[rows] - B_old, axis=1)
        last_change[rows] = change
        scale = np.maximum(1.0, np.linalg.norm(B[rows], axis=1))
        active[rows[change <= opts.tol * scale]] = False
        history.append(objectives(B, R))

    final = history[-1]
    best = int(np.argmin(final))
    beta = B[best].copy()
    trace = [float(h[best]) for h in history]
    converged = bool(last_change[best] <= opts.tol * max(1.0, float(np.linalg.norm(beta))))
    logger.debug("global_solve_tiny: %d candidates over %d supports, best objective %.6e", B.shape[0], masks.shape[0], final[best])

    return SolveResult(
        beta_hat=beta,
        objective_trace=trace,
        iterations=sweeps,
        converged=converged,
        stationarity_residual=stationarity_residual(X, y, beta, pen),
        info={"lambda": lam, "q": q, "supports": int(masks.shape[0]), "candidates": int(B.shape[0])},
    )
