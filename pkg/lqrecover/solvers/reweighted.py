"""
Iteratively reweighted ℓ1 solver for the constrained problem

    min_β ‖β‖_q^q  subject to  ‖y − Xβ‖₂ ≤ ε.

Each outer step solves a weighted ℓ1 problem over the same ε-ball with a
primal-dual (Chambolle-Pock) iteration, then updates the weights
w_i = (|β_i| + δ_k)^{q−1} with δ_k = max(0.1·2^{−k}, 1e-8).
"""

import logging
from typing import Optional, Tuple

import numpy as np
import numpy.typing as npt

from lqrecover.config import SolverOptions
from lqrecover.core import as_vector, check_problem, lq_power
from lqrecover.exceptions import ConfigurationError, SolverError
from lqrecover.solvers.base import SolveResult


logger = logging.getLogger(__name__)

FEASIBILITY_RTOL = 1e-6
_GAP_CHECK_EVERY = 10


def smoothing_schedule(k: int) -> float:
    """δ_k = max(0.1·2^{−k}, 1e-8)."""
    return max(0.1 * 2.0 ** (-k), 1e-8)


def _restore_feasibility(
    X: np.ndarray, y: np.ndarray, epsilon: float, beta: np.ndarray, anchor: np.ndarray
) -> np.ndarray:
    """
    Move beta toward a feasible anchor until ‖y − Xβ‖ ≤ ε.

    The residual along the segment is affine in the step, so the smallest
    feasible step is the lower root of a quadratic.
    """
    r_beta = X @ beta - y
    if np.linalg.norm(r_beta) <= epsilon:
        return beta
    d = (X @ anchor - y) - r_beta
    a = float(d @ d)
    b = float(r_beta @ d)
    c = float(r_beta @ r_beta) - epsilon ** 2
    if a == 0.0:
        return anchor.copy()
    disc = max(b * b - a * c, 0.0)
    theta = min(1.0, (-b - np.sqrt(disc)) / a * (1.0 + 1e-9) + 1e-12)
    return beta + max(theta, 0.0) * (anchor - beta)


def _weighted_l1_ball(
    X: np.ndarray,
    y: np.ndarray,
    epsilon: float,
    weights: np.ndarray,
    beta0: np.ndarray,
    dual0: np.ndarray,
    anchor: np.ndarray,
    max_iters: int,
    tol: float,
) -> Tuple[np.ndarray, np.ndarray, float, int]:
    """
    Solve min Σw_i|β_i| s.t. ‖Xβ − y‖ ≤ ε to relative duality gap ``tol``.

    Works in γ = w⊙β with A = X·diag(1/w), so the primal step is plain soft
    thresholding.

    Returns:
        (feasible β, dual variable, relative gap, iterations)
    """
    A = X / weights
    norm_a = np.linalg.norm(A, 2)
    if norm_a == 0:
        return np.zeros_like(beta0), dual0, 0.0, 0
    tau = sigma = 0.99 / norm_a
    gamma = weights * beta0
    gamma_bar = gamma.copy()
    z = dual0.copy()
    best = _restore_feasibility(X, y, epsilon, beta0, anchor)
    gap = np.inf

    it = 0
    for it in range(1, max_iters + 1):
        u = z + sigma * (A @ gamma_bar)
        v = u / sigma - y
        nv = np.linalg.norm(v)
        proj = y + (v if nv <= epsilon else v * (epsilon / nv))
        z = u - sigma * proj
        at_z = A.T @ z
        gamma_new = gamma - tau * at_z
        gamma_new = np.sign(gamma_new) * np.maximum(np.abs(gamma_new) - tau, 0.0)
        gamma_bar = 2.0 * gamma_new - gamma
        gamma = gamma_new

        if it % _GAP_CHECK_EVERY == 0 or it == max_iters:
            if not (np.all(np.isfinite(gamma)) and np.all(np.isfinite(z))):
                raise SolverError("Primal-dual iteration produced non-finite values", partial=best)
            best = _restore_feasibility(X, y, epsilon, gamma / weights, anchor)
            primal = float(np.sum(weights * np.abs(best)))
            scale = max(1.0, float(np.max(np.abs(at_z))))
            z_feas = z / scale
            dual = -float(z_feas @ y) - epsilon * float(np.linalg.norm(z_feas))
            gap = max(primal - dual, 0.0) / max(abs(primal), np.finfo(float).tiny)
            if gap <= tol:
                break

    return best, z, float(gap), it


def irl1_constrained_solve(
    X: npt.ArrayLike,
    y: npt.ArrayLike,
    epsilon: float,
    q: float,
    opts: Optional[SolverOptions] = None,
    beta0: Optional[npt.ArrayLike] = None,
) -> SolveResult:
    """
    Approximate minimizer of ‖β‖_q^q over the ball ‖y − Xβ‖₂ ≤ ε.

    Args:
        X: Design matrix.
        y: Observation.
        epsilon: Radius of the data-fit ball, > 0.
        q: Exponent in (0, 1]; q = 1 needs a single weighted solve.
        opts: ``max_iters`` caps outer steps, ``tol`` is the relative outer
            change, ``inner_max_iters``/``inner_tol`` drive the inner solver.
        beta0: Starting point of the weights, zeros by default.

    Returns:
        SolveResult whose trace holds ‖β^k‖_q^q per outer step. The returned
        iterate satisfies ‖y − Xβ̂‖₂ ≤ ε·(1 + 1e-6).

    Raises:
        ConfigurationError: For ε ≤ 0 or q outside (0, 1].
        SolverError: If the ε-ball is empty or the inner solver breaks down;
            ``partial`` holds the iterate so far.
    """
    X, y = check_problem(X, y)
    if not epsilon > 0:
        raise ConfigurationError(f"epsilon must be positive, got {epsilon}")
    if not 0.0 < q <= 1.0:
        raise ConfigurationError(f"q must lie in (0, 1], got {q}")
    opts = opts or SolverOptions()
    m, n = X.shape

    if np.linalg.norm(y) <= epsilon:
        return SolveResult(np.zeros(n), [0.0], 0, True, 0.0, info={"epsilon": epsilon, "q": q})

    anchor = np.linalg.lstsq(X, y, rcond=None)[0]
    anchor_residual = float(np.linalg.norm(X @ anchor - y))
    if anchor_residual > epsilon:
        raise SolverError(
            f"No feasible point: least-squares residual {anchor_residual:.4e} exceeds epsilon {epsilon:.4e}",
            partial=anchor,
        )

    beta = np.zeros(n) if beta0 is None else as_vector(beta0, "beta0", n).copy()
    dual = np.zeros(m)
    trace = []
    converged = False
    change = np.inf
    inner_iters = 0
    gap = np.inf

    k = 0
    for k in range(opts.max_iters):
        weights = (np.abs(beta) + smoothing_schedule(k)) ** (q - 1.0)
        try:
            new_beta, dual, gap, used = _weighted_l1_ball(
                X, y, epsilon, weights, beta, dual, anchor, opts.inner_max_iters, opts.inner_tol
            )
        except SolverError as e:
            raise SolverError(f"Inner solve failed at outer step {k}: {e}", partial=beta) from e
        inner_iters += used
        if gap > opts.inner_tol:
            logger.debug("inner solve at outer step %d stopped at relative gap %.2e", k, gap)
        change = float(np.linalg.norm(new_beta - beta))
        beta = new_beta
        trace.append(lq_power(beta, q))
        if q == 1.0 or change <= opts.tol * max(1.0, float(np.linalg.norm(beta))):
            converged = True
            break

    residual_norm = float(np.linalg.norm(y - X @ beta))
    if residual_norm > epsilon * (1.0 + FEASIBILITY_RTOL):
        raise SolverError(
            f"Returned iterate violates the data-fit ball: {residual_norm:.6e} > {epsilon:.6e}",
            partial=beta,
        )

    return SolveResult(
        beta_hat=beta,
        objective_trace=trace,
        iterations=k + 1,
        converged=converged,
        stationarity_residual=change,
        info={"epsilon": epsilon, "q": q, "inner_iterations": inner_iters, "inner_gap": gap},
    )
