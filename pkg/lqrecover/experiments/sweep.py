"""
Monte-Carlo sweep over sample sizes, estimators and trials.

Every (m, method, trial) cell is an independent work item. The instance of a
cell is seeded by (master_seed, m, trial), so all methods of a trial see the
same data; the fold shuffle of cross-validation is seeded by
(master_seed, m, method, trial). Results are collected in submission order,
so serial and parallel runs give identical tables.
"""

import logging
import math
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from lqrecover.bounds import (
    TheoremBounds,
    TuningParams,
    epsilon_experiment,
    event_indicators,
    lambda_default,
    theorem_bounds,
)
from lqrecover.config import CovarianceKind, CovarianceSpec, ExperimentConfig, MethodSpec, ProblemKind, Tuning
from lqrecover.core import ConeParams, RegressionInstance, cone_membership
from lqrecover.exceptions import LqRecoverError
from lqrecover.experiments.cross_validation import cross_validate_lambda, default_lambda_grid
from lqrecover.experiments.generate import derive_seed, generate_instance
from lqrecover.experiments.metrics import confidence_half_width, l2_error_sq, prediction_error, support_metrics
from lqrecover.penalties import PenaltyKind
from lqrecover.solvers import SolveResult, irl1_constrained_solve, prox_gradient_solve


logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.10g"

# Radius used for constrained solves of noiseless instances.
NOISELESS_EPSILON_RTOL = 1e-8

TRIAL_COLUMNS = [
    "trial", "seed", "method", "m", "lambda", "epsilon",
    "l2_error_sq", "prediction_error", "sensitivity", "specificity",
    "dominant_property_held", "bound_value", "bound_certified", "within_bound",
    "converged", "iterations", "descent_violation",
    "event_A", "event_B", "event_D", "error",
]

AGGREGATED_METRICS = ["sensitivity", "specificity", "l2_error_sq", "prediction_error"]


@dataclass
class TrialReport:
    """Outcome of one (m, method, trial) cell.

    ``bound_value`` is the random-design ℓ2 bound matching the method (the
    constrained bound for constrained solves, the regularized one otherwise).
    ``within_bound`` is only set when ``bound_certified`` holds: the design
    modulus is a certified positive lower bound and, for regularized solves,
    λ is at least the theory value. Otherwise the overlay is advisory.
    """
    trial: int
    seed: int
    method: str
    m: int
    lam: Optional[float] = None
    epsilon: Optional[float] = None
    beta_hat: Optional[np.ndarray] = field(default=None, repr=False)
    l2_error_sq: float = math.nan
    prediction_error: float = math.nan
    sensitivity: float = math.nan
    specificity: float = math.nan
    dominant_property_held: Optional[bool] = None
    bound_values: Optional[TheoremBounds] = None
    bound_value: Optional[float] = None
    bound_certified: bool = False
    within_bound: Optional[bool] = None
    converged: Optional[bool] = None
    iterations: int = 0
    descent_violation: float = math.nan
    event_A: Optional[bool] = None
    event_B: Optional[bool] = None
    event_D: Optional[bool] = None
    error: Optional[str] = None

    def to_row(self) -> Dict[str, Any]:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "method": self.method,
            "m": self.m,
            "lambda": self.lam,
            "epsilon": self.epsilon,
            "l2_error_sq": self.l2_error_sq,
            "prediction_error": self.prediction_error,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "dominant_property_held": self.dominant_property_held,
            "bound_value": self.bound_value,
            "bound_certified": self.bound_certified,
            "within_bound": self.within_bound,
            "converged": self.converged,
            "iterations": self.iterations,
            "descent_violation": self.descent_violation,
            "event_A": self.event_A,
            "event_B": self.event_B,
            "event_D": self.event_D,
            "error": self.error,
        }


@dataclass
class SweepResult:
    trials: List[TrialReport]
    aggregated: pd.DataFrame

    def trials_frame(self) -> pd.DataFrame:
        return trials_frame(self.trials)


def design_modulus_floor(cov: CovarianceSpec, n: int) -> float:
    """
    Certified lower bound √λ_min(Σ) on φ_q(s, t, a, Σ^{1/2}).

    ‖Σ^{1/2}δ‖₂ ≥ √λ_min(Σ)·‖δ‖₂ ≥ √λ_min(Σ)·‖δ_T‖₂ for every index set T,
    and for Σ = I the value 1 is attained by any s-sparse δ.
    """
    if cov.kind is CovarianceKind.IDENTITY:
        return 1.0
    smallest = float(np.linalg.eigvalsh(cov.matrix_for(n))[0])
    return math.sqrt(max(smallest, 0.0))


def _noise_radius(instance: RegressionInstance) -> float:
    if instance.sigma > 0:
        return epsilon_experiment(instance.sigma, instance.m)
    return NOISELESS_EPSILON_RTOL * max(1.0, float(np.linalg.norm(instance.y)))


def _tune_and_solve(
    config: ExperimentConfig, method: MethodSpec, instance: RegressionInstance, cv_seed: int
) -> Tuple[SolveResult, Optional[float], Optional[float]]:
    """Solve one instance with one method; returns (result, λ, ε)."""
    X, y = instance.X, instance.y
    if method.problem is ProblemKind.CONSTRAINED:
        eps = _noise_radius(instance)
        return irl1_constrained_solve(X, y, eps, method.q, config.solver), None, eps

    if method.tuning is Tuning.THEORY:
        p = TuningParams.for_truth(instance.beta_star, instance.sigma, instance.m, method.q,
                                   a=config.a, theta=config.theta, b=config.b)
        lam = lambda_default(p).lam
    else:
        grid = config.lambda_grid or default_lambda_grid(X, y, config.num_lambdas, config.lambda_ratio)
        lam = cross_validate_lambda(X, y, method.penalty_spec(1.0), grid, config.cv_folds, cv_seed, config.solver).lam
    return prox_gradient_solve(X, y, method.penalty_spec(lam), config.solver), lam, None


def _overlay_bounds(
    report: TrialReport,
    config: ExperimentConfig,
    method: MethodSpec,
    instance: RegressionInstance,
    phi_floor: float,
) -> None:
    """Attach theory bounds and noise events for ℓq and ℓ1 methods of noisy instances."""
    if method.penalty not in (PenaltyKind.LQ, PenaltyKind.L1) or instance.sigma <= 0:
        return
    constrained = method.problem is ProblemKind.CONSTRAINED
    p = TuningParams.for_truth(instance.beta_star, instance.sigma, instance.m, method.q,
                               a=config.a, theta=config.theta, b=config.b)
    s = max(instance.s, 1)
    t = max(config.effective_t, s)
    bounds = theorem_bounds(p, s, t, phi_sigma_half=phi_floor if phi_floor > 0 else None,
                            lam=report.lam, epsilon=report.epsilon)
    report.bound_values = bounds
    report.bound_value = bounds.random_cp_l2 if constrained else bounds.random_rp_l2
    tuned_enough = constrained or report.lam >= lambda_default(p).lam * (1.0 - 1e-12)
    report.bound_certified = bool(phi_floor > 0 and report.bound_value is not None and tuned_enough)
    if report.bound_certified:
        report.within_bound = bool(report.l2_error_sq <= report.bound_value)

    events = event_indicators(instance.X, instance.e, p)
    report.event_A, report.event_B, report.event_D = events.A, events.B, events.D


def run_trial(config: ExperimentConfig, m: int, method: MethodSpec, trial: int, phi_floor: float = 1.0) -> TrialReport:
    """
    Generate, tune, solve and score one cell. Library errors are caught and
    stored in ``TrialReport.error``.
    """
    seed = derive_seed(config.master_seed, m, trial)
    cv_seed = derive_seed(config.master_seed, m, method.name, trial)
    report = TrialReport(trial=trial, seed=seed, method=method.name, m=m)
    try:
        instance = generate_instance(m, config.n, config.s, config.sigma, config.covariance, seed,
                                     config.beta_min_magnitude)
        result, report.lam, report.epsilon = _tune_and_solve(config, method, instance, cv_seed)
        beta_hat = result.beta_hat
        report.beta_hat = beta_hat
        report.converged = result.converged
        report.iterations = result.iterations
        if method.problem is ProblemKind.REGULARIZED:
            report.descent_violation = result.max_objective_increase()
        report.l2_error_sq = l2_error_sq(beta_hat, instance.beta_star)
        report.prediction_error = prediction_error(instance.X, beta_hat, instance.beta_star)
        report.sensitivity, report.specificity = support_metrics(beta_hat, instance.beta_star, config.support_tol)

        q = method.cone_exponent
        if q is not None:
            a = 1.0 if method.problem is ProblemKind.CONSTRAINED else config.a
            cone = ConeParams(q, max(instance.s, 1), a)
            report.dominant_property_held = cone_membership(beta_hat - instance.beta_star, cone)
        _overlay_bounds(report, config, method, instance, phi_floor)
        if not result.converged:
            logger.warning("%s did not converge at m=%d, trial %d", method.name, m, trial)
    except (LqRecoverError, np.linalg.LinAlgError) as e:
        report.error = f"{type(e).__name__}: {e}"
        logger.warning("Trial %d of %s at m=%d failed: %s", trial, method.name, m, e)
    return report


def run_sweep(config: ExperimentConfig, n_jobs: int = 1) -> SweepResult:
    """
    Run every (m, method, trial) cell of ``config``.

    Args:
        config: Sweep configuration.
        n_jobs: joblib worker count (-1 for all cores). The output does not
            depend on it.

    Returns:
        SweepResult with the per-trial reports in (m, method, trial) order and
        the aggregated table.
    """
    phi_floor = design_modulus_floor(config.covariance, config.n)
    cells = [(m, method, trial)
             for m in config.sample_sizes
             for method in config.methods
             for trial in range(config.num_trials)]
    logger.info("Running %d trials (%d sample sizes, %d methods) with n_jobs=%d",
                len(cells), len(config.sample_sizes), len(config.methods), n_jobs)
    trials = Parallel(n_jobs=n_jobs)(
        delayed(run_trial)(config, m, method, trial, phi_floor) for m, method, trial in cells
    )
    failed = sum(1 for t in trials if t.error is not None)
    if failed:
        logger.warning("%d of %d trials failed", failed, len(trials))
    return SweepResult(trials=list(trials), aggregated=aggregate_trials(trials))


def trials_frame(trials: List[TrialReport]) -> pd.DataFrame:
    return pd.DataFrame([t.to_row() for t in trials], columns=TRIAL_COLUMNS)


def aggregate_trials(trials: List[TrialReport]) -> pd.DataFrame:
    """
    Long table with one row per (method, m): trial counts, failures, and the
    mean and 95% half-width of each metric over successful trials.

    Methods keep their configured order and m is ascending.
    """
    frame = trials_frame(trials)
    method_order = list(dict.fromkeys(frame["method"]))
    rows = []
    for (method, m), group in frame.groupby(["method", "m"], sort=False):
        ok = group[group["error"].isna()]
        row: Dict[str, Any] = {"method": method, "m": int(m), "trials": len(group), "failures": len(group) - len(ok)}
        for metric in AGGREGATED_METRICS:
            values = ok[metric].astype(float).to_numpy()
            row[f"{metric}_mean"] = float(np.mean(values)) if values.size else math.nan
            row[f"{metric}_ci"] = confidence_half_width(values)
        held = ok["dominant_property_held"].dropna()
        row["dominant_property_rate"] = float(held.astype(bool).mean()) if len(held) else math.nan
        certified = ok[ok["bound_certified"].astype(bool)]["within_bound"].dropna()
        row["bound_coverage"] = float(certified.astype(bool).mean()) if len(certified) else math.nan
        rows.append(row)
    out = pd.DataFrame(rows)
    if out.empty:
        return out
    out["method"] = pd.Categorical(out["method"], categories=method_order, ordered=True)
    out = out.sort_values(["method", "m"], kind="stable").reset_index(drop=True)
    out["method"] = out["method"].astype(str)
    return out


def tables_layout(aggregated: pd.DataFrame, metric: str = "sensitivity") -> pd.DataFrame:
    """Pivot to one row per method and one column per m, holding ``<metric>_mean``."""
    column = metric if metric in aggregated.columns else f"{metric}_mean"
    if column not in aggregated.columns:
        raise KeyError(f"Aggregated table has no column for metric '{metric}'")
    method_order = list(dict.fromkeys(aggregated["method"]))
    table = aggregated.pivot(index="method", columns="m", values=column)
    table = table.reindex(method_order)
    table.columns = [str(c) for c in table.columns]
    return table


def theory_tuned(config: ExperimentConfig) -> Optional[ExperimentConfig]:
    """
    The methods of ``config`` that have a cone, with regularized ones switched
    to the theory λ. None when no method qualifies.
    """
    methods = [
        dataclasses.replace(m, tuning=Tuning.THEORY) if m.problem is ProblemKind.REGULARIZED else m
        for m in config.methods
        if m.cone_exponent is not None
    ]
    return config.replace(methods=methods) if methods else None


def dominant_property_rate(
    source: Union[ExperimentConfig, SweepResult, List[TrialReport]], n_jobs: int = 1
) -> Dict[str, float]:
    """
    Per-method fraction of successful trials whose residual β̂ − β* lies in
    the cone: C_q(s, 1) for constrained solves, C_q(s, a) for regularized ones.

    A configuration is swept through ``theory_tuned`` first, so regularized
    solves use the theory λ whatever tuning the methods carry. Recorded
    trials are counted as they are. ℓ0, SCAD and MCP have no cone and are
    absent.
    """
    if isinstance(source, ExperimentConfig):
        tuned = theory_tuned(source)
        if tuned is None:
            logger.warning("No method of the configuration has a cone; nothing to rate")
            return {}
        if tuned.sigma <= 0 and any(m.problem is ProblemKind.REGULARIZED for m in tuned.methods):
            logger.warning("The theory λ needs sigma > 0; regularized trials of a noiseless sweep fail")
        source = run_sweep(tuned, n_jobs)
    trials = source.trials if isinstance(source, SweepResult) else source
    counts: Dict[str, List[int]] = {}
    for t in trials:
        if t.error is not None or t.dominant_property_held is None:
            continue
        held, total = counts.setdefault(t.method, [0, 0])
        counts[t.method] = [held + int(t.dominant_property_held), total + 1]
    return {method: held / total for method, (held, total) in counts.items()}


def write_sweep_outputs(result: SweepResult, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """Write the per-trial and aggregated CSVs; returns their paths by role."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"trials": out_dir / "trials.csv", "aggregated": out_dir / "aggregated.csv"}
    result.trials_frame().to_csv(paths["trials"], index=False, float_format=CSV_FLOAT_FORMAT)
    result.aggregated.to_csv(paths["aggregated"], index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info("Wrote %s and %s", paths["trials"], paths["aggregated"])
    return paths
