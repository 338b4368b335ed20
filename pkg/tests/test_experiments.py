"""
Tests for instance generation, cross-validation, metrics, the sweep and the
bound-coverage run on the 2×3 design.
"""

import dataclasses
import math

import numpy as np
import pandas as pd
import pytest
from scipy.optimize import linprog

from lqrecover.bounds import TuningParams, lambda_default
from lqrecover.config import CovarianceSpec, ExperimentConfig, SearchConfig, SolverOptions, Tuning
from lqrecover.exceptions import ConfigurationError
from lqrecover.experiments import (
    aggregate_trials,
    confidence_half_width,
    cross_validate_lambda,
    default_lambda_grid,
    derive_seed,
    design_modulus_floor,
    dominant_property_rate,
    fold_indices,
    generate_instance,
    l2_error_sq,
    prediction_error,
    run_sweep,
    run_trial,
    support_metrics,
    tables_layout,
    theory_tuned,
    verify_example1,
    write_sweep_outputs,
)
from lqrecover.experiments import sweep as sweep_module
from lqrecover.experiments.example1 import COVERAGE_COLUMNS, NOT_APPLICABLE
from lqrecover.penalties import PenaltyKind, PenaltySpec
from lqrecover.regularity import CertificationStatus, rec_modulus_estimate
from lqrecover.solvers import SolveResult, prox_gradient_solve


@pytest.fixture
def small_config():
    """A sweep small enough to run in a few seconds."""
    return ExperimentConfig(
        n=32,
        s=2,
        sample_sizes=[16, 24],
        sigma=0.01,
        num_trials=2,
        methods=["l1", "l1/2", "cp-l1", "l0"],
        cv_folds=3,
        lambda_grid=[0.1, 0.01, 0.001],
        solver=SolverOptions(max_iters=100, inner_max_iters=300),
    )


def test_derive_seed_is_stable():
    """Test that seeds depend only on their parts."""
    assert derive_seed(0, 177, 3) == derive_seed(0, 177, 3)
    assert derive_seed(0, 177, 3) != derive_seed(0, 177, 4)
    assert 0 <= derive_seed("x") < 2 ** 63


def test_generate_instance_deterministic():
    """Test that equal seeds give bit-identical instances."""
    first = generate_instance(20, 50, 5, 0.1, seed=11)
    second = generate_instance(20, 50, 5, 0.1, seed=11)
    other = generate_instance(20, 50, 5, 0.1, seed=12)

    assert np.array_equal(first.X, second.X)
    assert np.array_equal(first.y, second.y)
    assert not np.array_equal(first.X, other.X)
    # Check the sparsity and minimum magnitude of β*
    assert first.s == 5
    assert np.min(np.abs(first.beta_star[first.beta_star != 0])) >= 0.1


def test_generate_instance_noiseless():
    """Test that σ = 0 gives y = Xβ* exactly."""
    inst = generate_instance(10, 30, 3, 0.0, seed=1)

    assert np.all(inst.e == 0)
    assert np.array_equal(inst.y, inst.X @ inst.beta_star)


def test_generate_instance_correlated_design():
    """Test that Toeplitz rows have the requested covariance on average."""
    cov = CovarianceSpec(kind="toeplitz", rho=0.6)

    inst = generate_instance(4000, 3, 1, 0.0, cov=cov, seed=2)

    empirical = inst.X.T @ inst.X / 4000
    assert np.allclose(empirical, cov.matrix_for(3), atol=0.1)


def test_generate_instance_errors():
    """Test invalid generation arguments."""
    with pytest.raises(ConfigurationError):
        generate_instance(10, 5, 6, 0.1)
    with pytest.raises(ConfigurationError):
        generate_instance(10, 5, 2, -0.1)


def test_support_metrics_examples():
    """Test sensitivity and specificity on hand-made supports."""
    beta_star = np.array([1.0, 0.0, 2.0, 0.0])

    # all true entries found, one false positive out of two zeros
    assert support_metrics([1.0, 0.0, 2.0, 1e-3], beta_star) == (1.0, 0.5)
    # nothing selected
    assert support_metrics(np.zeros(4), beta_star) == (0.0, 1.0)
    # entries at or below the tolerance are not selected
    assert support_metrics([1e-5, 0.0, 2.0, 0.0], beta_star) == (0.5, 1.0)


def test_support_metrics_conventions():
    """Test the empty and full support conventions."""
    assert support_metrics([1.0, 0.0], [0.0, 0.0]) == (1.0, 0.5)
    assert support_metrics([0.0, 1.0], [1.0, 1.0]) == (0.5, 1.0)


def test_error_metrics():
    """Test the squared ℓ2 and prediction errors."""
    X = np.array([[1.0, 0.0], [0.0, 2.0]])

    assert l2_error_sq([1.0, 1.0], [0.0, 0.0]) == pytest.approx(2.0)
    assert prediction_error(X, [1.0, 1.0], [0.0, 0.0]) == pytest.approx(2.5)


def test_confidence_half_width():
    """Test the normal-approximation interval."""
    assert confidence_half_width([1.0, 3.0]) == pytest.approx(1.96 * math.sqrt(2.0) / math.sqrt(2.0))
    assert math.isnan(confidence_half_width([1.0]))
    # Non-finite values are ignored
    assert confidence_half_width([1.0, 3.0, math.nan]) == pytest.approx(1.96)


def test_fold_indices_partition():
    """Test that folds are disjoint and cover every row."""
    folds = fold_indices(10, 3, seed=4)

    assert sorted(len(f) for f in folds) == [3, 3, 4]
    assert sorted(np.concatenate(folds).tolist()) == list(range(10))

    with pytest.raises(ConfigurationError):
        fold_indices(2, 3, seed=0)
    with pytest.raises(ConfigurationError):
        fold_indices(10, 1, seed=0)


def test_default_lambda_grid_starts_at_zero_solution(sparse_problem):
    """Test that the ℓ1 solution at the largest grid value is zero."""
    X, y, _ = sparse_problem

    grid = default_lambda_grid(X, y, num=5, ratio=1e-2)

    assert grid[0] == pytest.approx(np.max(np.abs(X.T @ y)) / X.shape[0])
    assert grid[-1] == pytest.approx(grid[0] * 1e-2)
    result = prox_gradient_solve(X, y, PenaltySpec(PenaltyKind.L1, grid[0]))
    assert np.allclose(result.beta_hat, 0.0, atol=1e-12)


def test_cross_validation_single_value(sparse_problem):
    """Test that a one-point grid returns that point."""
    X, y, _ = sparse_problem

    result = cross_validate_lambda(X, y, PenaltySpec(PenaltyKind.L1, 1.0), [0.05], folds=5, seed=0)

    assert result.lam == 0.05
    assert len(result.errors) == 1


def test_cross_validation_prefers_small_lambda_without_noise(sparse_problem):
    """Test that a noiseless problem favours the weaker penalty."""
    X, y, _ = sparse_problem

    result = cross_validate_lambda(X, y, PenaltySpec(PenaltyKind.L1, 1.0), [1.0, 1e-3], folds=5, seed=0)

    assert result.lam == 1e-3
    assert result.errors[1] < result.errors[0]
    assert result.grid == [1.0, 1e-3]


def test_design_modulus_floor():
    """Test the certified floor √λ_min(Σ)."""
    assert design_modulus_floor(CovarianceSpec(), 10) == 1.0
    assert design_modulus_floor(CovarianceSpec(kind="toeplitz", rho=0.5), 2) == pytest.approx(math.sqrt(0.5))


def test_run_trial_records_failure(small_config, mocker):
    """Test that a library error inside a trial is stored, not raised."""
    mocker.patch(
        "lqrecover.experiments.sweep.generate_instance",
        side_effect=ConfigurationError("bad draw"),
    )

    report = run_trial(small_config, 16, small_config.methods[0], 0)

    assert report.error == "ConfigurationError: bad draw"
    assert math.isnan(report.sensitivity)


def test_small_sweep(small_config):
    """Test trial order, metric ranges and the aggregated layout."""
    result = run_sweep(small_config)

    trials = result.trials
    assert len(trials) == 2 * 4 * 2
    assert [(t.m, t.method, t.trial) for t in trials[:4]] == [
        (16, "l1", 0), (16, "l1", 1), (16, "l1/2", 0), (16, "l1/2", 1),
    ]
    ok = [t for t in trials if t.error is None]
    assert ok
    for t in ok:
        assert 0.0 <= t.sensitivity <= 1.0
        assert 0.0 <= t.specificity <= 1.0
    # Every method of a trial sees the same instance
    seeds = {(t.m, t.trial): set() for t in trials}
    for t in trials:
        seeds[(t.m, t.trial)].add(t.seed)
    assert all(len(v) == 1 for v in seeds.values())
    # ℓ0 has no cone, constrained solves carry ε, regularized ones λ
    for t in ok:
        if t.method == "l0":
            assert t.dominant_property_held is None
        if t.method == "cp-l1":
            assert t.epsilon is not None and t.lam is None
        if t.method == "l1":
            assert t.lam in small_config.lambda_grid

    aggregated = result.aggregated
    assert list(aggregated["method"]) == ["l1", "l1", "l1/2", "l1/2", "cp-l1", "cp-l1", "l0", "l0"]
    assert list(aggregated["m"]) == [16, 24] * 4
    assert set(aggregated["trials"]) == {2}
    assert "sensitivity_mean" in aggregated.columns and "sensitivity_ci" in aggregated.columns


def test_aggregate_trials_means(small_config):
    """Test that each aggregated cell is the mean over its successful trials."""
    result = run_sweep(small_config.replace(methods=["l1", "cp-l1"]))

    aggregated = aggregate_trials(result.trials)

    pd.testing.assert_frame_equal(aggregated, result.aggregated)
    for row in aggregated.itertuples():
        cell = [t for t in result.trials if t.method == row.method and t.m == row.m and t.error is None]
        if cell:
            assert row.sensitivity_mean == pytest.approx(np.mean([t.sensitivity for t in cell]), abs=1e-12)
            assert row.specificity_mean == pytest.approx(np.mean([t.specificity for t in cell]), abs=1e-12)
        assert row.trials == 2


def test_sweep_is_independent_of_workers(small_config):
    """Test that serial and parallel runs give the same trial table."""
    config = small_config.replace(methods=["l1", "cp-l1"], sample_sizes=[16])

    serial = run_sweep(config, n_jobs=1).trials_frame()
    parallel = run_sweep(config, n_jobs=2).trials_frame()

    pd.testing.assert_frame_equal(serial, parallel)


def test_tables_layout(small_config):
    """Test the method × m pivot of the aggregated table."""
    result = run_sweep(small_config.replace(methods=["l1", "l1/2"]))

    table = tables_layout(result.aggregated, "specificity")

    assert list(table.index) == ["l1", "l1/2"]
    assert list(table.columns) == ["16", "24"]
    assert table.loc["l1", "16"] == pytest.approx(
        result.aggregated.query("method == 'l1' and m == 16")["specificity_mean"].iloc[0]
    )
    with pytest.raises(KeyError):
        tables_layout(result.aggregated, "accuracy")


def test_dominant_property_rate(small_config):
    """Test the per-method cone rates from a configuration and from trials."""
    config = small_config.replace(sample_sizes=[24], num_trials=1)

    from_config = dominant_property_rate(config)
    from_trials = dominant_property_rate(run_sweep(theory_tuned(config)).trials)

    assert from_config == from_trials
    assert "l0" not in from_config
    assert all(0.0 <= v <= 1.0 for v in from_config.values())


def test_dominant_property_rate_uses_theory_lambda(small_config, mocker):
    """Test that regularized methods are re-solved at the theory λ and SCAD is left out."""
    config = small_config.replace(sample_sizes=[24], num_trials=1, methods=["l1/2", "l1", "scad", "cp-l1"])
    cv = mocker.spy(sweep_module, "cross_validate_lambda")
    swept = mocker.spy(sweep_module, "run_sweep")

    rates = dominant_property_rate(config)

    assert "scad" not in rates
    cv.assert_not_called()
    tuned = swept.call_args.args[0]
    assert [m.name for m in tuned.methods] == ["l1/2", "l1", "cp-l1"]
    assert [m.tuning for m in tuned.methods[:2]] == [Tuning.THEORY, Tuning.THEORY]

    report = run_trial(tuned, 24, tuned.methods[0], 0)
    instance = generate_instance(24, config.n, config.s, config.sigma, config.covariance, report.seed,
                                 config.beta_min_magnitude)
    p = TuningParams.for_truth(instance.beta_star, config.sigma, 24, 0.5, a=config.a, theta=config.theta, b=config.b)
    assert report.lam == pytest.approx(lambda_default(p).lam)


def test_dominant_property_rate_noiseless_exact_l1(small_config, mocker):
    """Test that exact ℓ1 minimizers of noiseless instances always lie in the cone."""

    def basis_pursuit(X, y, epsilon, q, opts=None, beta0=None):
        # min ‖β‖₁ s.t. Xβ = y as a linear program in (β⁺, β⁻)
        n = X.shape[1]
        res = linprog(np.ones(2 * n), A_eq=np.hstack([X, -X]), b_eq=y, bounds=(0, None), method="highs")
        beta = res.x[:n] - res.x[n:]
        # vertex solution; clear round-off
        beta[np.abs(beta) < 1e-9] = 0.0
        return SolveResult(beta, [float(np.abs(beta).sum())], 1, True, 0.0)

    mocker.patch.object(sweep_module, "irl1_constrained_solve", side_effect=basis_pursuit)
    config = small_config.replace(sigma=0.0, sample_sizes=[16, 24], num_trials=3, methods=["cp-l1"])

    assert dominant_property_rate(config) == {"cp-l1": 1.0}


def test_write_sweep_outputs(small_config, tmp_path):
    """Test the CSV outputs of a sweep."""
    result = run_sweep(small_config.replace(methods=["l1"], sample_sizes=[16]))

    paths = write_sweep_outputs(result, tmp_path / "out")

    trials = pd.read_csv(paths["trials"])
    aggregated = pd.read_csv(paths["aggregated"])
    assert len(trials) == 2
    assert "within_bound" in trials.columns
    assert list(aggregated["method"]) == ["l1"]


def test_verify_example1_small():
    """Test the coverage table on a two-point λ grid."""
    report = verify_example1(
        lambda_grid=[1e-2, 1.0],
        num_noise_draws=10,
        seed=3,
        search=SearchConfig(num_starts=20, max_iters=100),
    )

    table = report.table
    assert list(table.columns) == COVERAGE_COLUMNS
    assert len(table) == 2
    assert report.noise_std == pytest.approx(0.1)
    assert report.noise_interpretation == "variance"
    # ℓ1 has a zero modulus on this design
    assert set(table["l1_bound_status"]) == {NOT_APPLICABLE}
    assert table["l1_bound"].isna().all()
    assert table["l1_coverage"].isna().all()
    assert table["l1_conservative_coverage"].isna().all()
    # ℓ1/2 is certified and its bound holds at the largest λ
    assert set(table["lhalf_bound_status"]) == {"CERTIFIED"}
    assert table["lhalf_coverage"].iloc[-1] == 1.0
    assert (table["lhalf_mean_error"] >= 0).all()
    assert report.summary()["phi"]["l1"]["certified"] == "ZERO"


def test_verify_example1_conservative_coverage(mocker):
    """Test the coverage at a positive analytic lower bound on the modulus."""
    search_only = rec_modulus_estimate

    def with_lower_bound(X, rec, search=None):
        est = search_only(X, rec, search)
        if est.certified is CertificationStatus.POSITIVE:
            est = dataclasses.replace(est, analytic_lower=0.5 * est.modulus_upper)
        return est

    mocker.patch("lqrecover.experiments.example1.rec_modulus_estimate", side_effect=with_lower_bound)

    table = verify_example1(lambda_grid=[1e-2, 1.0], num_noise_draws=10, seed=3,
                            search=SearchConfig(num_starts=20, max_iters=100)).table

    # A smaller modulus gives a larger bound and at least the same coverage
    assert (table["lhalf_conservative_bound"] > table["lhalf_bound"]).all()
    assert (table["lhalf_conservative_coverage"] >= table["lhalf_coverage"]).all()
    assert table["l1_conservative_bound"].isna().all()


def test_verify_example1_noise_as_std():
    """Test reading the noise level as a standard deviation."""
    report = verify_example1(lambda_grid=[1.0], num_noise_draws=3, noise_is_std=True,
                             search=SearchConfig(num_starts=10, max_iters=50))

    assert report.noise_std == pytest.approx(0.01)
    assert report.noise_interpretation == "std"
