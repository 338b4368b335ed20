"""
Bound-coverage experiment on the 2×3 design that satisfies the ℓ1/2
restricted eigenvalue condition but not the classical (ℓ1) one.

For every λ of a log grid the same noise draws are solved by the global
ℓ1/2 solver and by FISTA for ℓ1, and the squared ℓ2 errors are compared with
the regularized-problem ℓ2 bound evaluated at the estimated modulus.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from lqrecover.bounds import theorem2_bounds
from lqrecover.config import SearchConfig, SolverOptions
from lqrecover.experiments.generate import derive_seed
from lqrecover.experiments.metrics import confidence_half_width
from lqrecover.penalties import PenaltyKind, PenaltySpec
from lqrecover.regularity import CertificationStatus, RecEstimate, RecParams, rec_modulus_estimate
from lqrecover.solvers import global_solve_tiny, prox_gradient_solve


logger = logging.getLogger(__name__)

EXAMPLE1_DESIGN = np.array([[2.0, 3.0, 1.0], [2.0, 1.0, 3.0]])
EXAMPLE1_BETA = np.array([1.0, 0.0, 0.0])
EXAMPLE1_NOISE_LEVEL = 0.01

NOT_APPLICABLE = "NOT-APPLICABLE"
CERTIFIED = "CERTIFIED"
ADVISORY = "ADVISORY"

COVERAGE_COLUMNS = [
    "lambda",
    "lhalf_mean_error", "lhalf_ci", "lhalf_bound", "lhalf_coverage", "lhalf_bound_status",
    "lhalf_conservative_bound", "lhalf_conservative_coverage",
    "l1_mean_error", "l1_ci", "l1_bound", "l1_coverage", "l1_bound_status",
    "l1_conservative_bound", "l1_conservative_coverage",
]


def example1_lambda_grid(num: int = 25, low: float = 1e-8, high: float = 1.0) -> List[float]:
    return [float(v) for v in np.geomspace(low, high, num)]


@dataclass
class Example1Report:
    """Coverage table plus the settings it was produced with.

    Attributes:
        table: One row per λ with ``COVERAGE_COLUMNS``.
        noise_std: Standard deviation of the noise draws.
        noise_interpretation: "variance" when 0.01 was read as the variance,
            "std" when it was read as the standard deviation.
        num_noise_draws: Draws per λ.
        seed: Seed of the noise draws.
        estimates: Modulus estimates by exponent label ("lhalf", "l1").
        a: Cone constant of the bound.
    """
    table: pd.DataFrame
    noise_std: float
    noise_interpretation: str
    num_noise_draws: int
    seed: int
    estimates: Dict[str, RecEstimate] = field(default_factory=dict)
    a: float = 1.0

    def summary(self) -> Dict[str, Any]:
        return {
            "noise_std": self.noise_std,
            "noise_interpretation": self.noise_interpretation,
            "num_noise_draws": self.num_noise_draws,
            "seed": self.seed,
            "a": self.a,
            "phi": {label: est.to_dict() for label, est in self.estimates.items()},
        }


def _bound_for(phi: Optional[float], q: float, a: float, lam: float) -> Optional[float]:
    if phi is None or not phi > 0:
        return None
    m = EXAMPLE1_DESIGN.shape[0]
    return theorem2_bounds(phi, m, q, 1, 1, a, lam).l2


def _bounds_for(estimate: RecEstimate, q: float, a: float, lam: float) -> Tuple[Optional[float], Optional[float]]:
    """
    The ℓ2 bound at the search value of φ and at the analytic lower bound.

    The search value can only overestimate φ, so the first bound may be
    optimistic; the second is conservative and None unless the lower bound
    is positive.
    """
    if estimate.certified is CertificationStatus.ZERO:
        return None, None
    return _bound_for(estimate.modulus_upper, q, a, lam), _bound_for(estimate.analytic_lower, q, a, lam)


def _status(estimate: RecEstimate) -> str:
    match estimate.certified:
        case CertificationStatus.ZERO:
            return NOT_APPLICABLE
        case CertificationStatus.POSITIVE:
            return CERTIFIED
        case _:
            return ADVISORY


def _errors_at(lam: float, noise: np.ndarray, tiny_opts: SolverOptions, fista_opts: SolverOptions) -> Dict[str, np.ndarray]:
    """Squared ℓ2 errors of both estimators for every noise draw at one λ."""
    clean = EXAMPLE1_DESIGN @ EXAMPLE1_BETA
    lhalf = np.empty(noise.shape[0])
    l1 = np.empty(noise.shape[0])
    l1_pen = PenaltySpec(PenaltyKind.L1, lam)
    for k, e in enumerate(noise):
        y = clean + e
        beta = global_solve_tiny(EXAMPLE1_DESIGN, y, lam, 0.5, opts=tiny_opts).beta_hat
        lhalf[k] = float(np.sum((beta - EXAMPLE1_BETA) ** 2))
        beta = prox_gradient_solve(EXAMPLE1_DESIGN, y, l1_pen, fista_opts).beta_hat
        l1[k] = float(np.sum((beta - EXAMPLE1_BETA) ** 2))
    return {"lhalf": lhalf, "l1": l1}


def _coverage(errors: np.ndarray, bound: Optional[float]) -> float:
    if bound is None:
        return math.nan
    return float(np.mean(errors <= bound))


def verify_example1(
    lambda_grid: Optional[Sequence[float]] = None,
    num_noise_draws: int = 500,
    seed: int = 0,
    noise_is_std: bool = False,
    a: float = 1.0,
    search: Optional[SearchConfig] = None,
    n_jobs: int = 1,
) -> Example1Report:
    """
    Empirical coverage of the ℓ2 bound on X = [[2,3,1],[2,1,3]], β* = (1,0,0).

    Args:
        lambda_grid: λ values; 25 log-spaced points in [1e-8, 1] by default.
        num_noise_draws: Noise draws per λ (the same draws for every λ).
        seed: Seed of the noise draws.
        noise_is_std: Read the noise level 0.01 as a standard deviation
            instead of a variance.
        a: Cone constant of the modulus and the bound.
        search: Settings of the modulus search.
        n_jobs: joblib workers over λ values.

    Returns:
        Example1Report. The ℓ1 overlay is NOT-APPLICABLE because the kernel
        direction (−2, 1, 1) lies in the ℓ1 cone, so its modulus is zero.
    """
    grid = example1_lambda_grid() if lambda_grid is None else [float(v) for v in lambda_grid]
    noise_std = EXAMPLE1_NOISE_LEVEL if noise_is_std else math.sqrt(EXAMPLE1_NOISE_LEVEL)
    m = EXAMPLE1_DESIGN.shape[0]
    noise = noise_std * np.random.default_rng(seed).standard_normal((num_noise_draws, m))

    estimates = {
        "lhalf": rec_modulus_estimate(EXAMPLE1_DESIGN, RecParams(0.5, 1, 1, a), search),
        "l1": rec_modulus_estimate(EXAMPLE1_DESIGN, RecParams(1.0, 1, 1, a), search),
    }
    for label, est in estimates.items():
        logger.info("Coverage design modulus %s: %.6g (%s)", label, est.modulus_upper, est.certified.value)
    if estimates["lhalf"].certified is not CertificationStatus.POSITIVE:
        logger.warning("The l1/2 modulus was not certified positive; its coverage is advisory")

    tiny_opts = SolverOptions(max_iters=1000, tol=1e-10, num_starts=4, seed=derive_seed(seed, "example1"))
    fista_opts = SolverOptions(max_iters=20000, tol=1e-9)
    errors = Parallel(n_jobs=n_jobs)(delayed(_errors_at)(lam, noise, tiny_opts, fista_opts) for lam in grid)

    rows = []
    for lam, err in zip(grid, errors):
        row: Dict[str, Any] = {"lambda": lam}
        for label, q in (("lhalf", 0.5), ("l1", 1.0)):
            bound, conservative = _bounds_for(estimates[label], q, a, lam)
            row.update({
                f"{label}_mean_error": float(np.mean(err[label])),
                f"{label}_ci": confidence_half_width(err[label]),
                f"{label}_bound": math.nan if bound is None else bound,
                f"{label}_coverage": _coverage(err[label], bound),
                f"{label}_bound_status": _status(estimates[label]),
                f"{label}_conservative_bound": math.nan if conservative is None else conservative,
                f"{label}_conservative_coverage": _coverage(err[label], conservative),
            })
        rows.append(row)
    table = pd.DataFrame(rows, columns=COVERAGE_COLUMNS)
    return Example1Report(
        table=table,
        noise_std=noise_std,
        noise_interpretation="std" if noise_is_std else "variance",
        num_noise_draws=num_noise_draws,
        seed=seed,
        estimates=estimates,
        a=a,
    )
