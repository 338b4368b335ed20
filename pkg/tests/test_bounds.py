"""
Tests for the tuning rules, recovery bounds and probability floors.
"""

import math

import numpy as np
import pytest

from lqrecover.bounds import (
    TuningParams,
    UniversalConstants,
    bounds_report,
    l1_lambda,
    epsilon_default,
    epsilon_experiment,
    event_indicators,
    l1_from_lq_bound,
    lambda_default,
    noise_norm_tail,
    probability_floors,
    sample_size_thresholds,
    theorem1_bound,
    theorem2_bounds,
    theorem34_bounds,
    theorem_bounds,
)
from lqrecover.exceptions import ConfigurationError, DataShapeError
from lqrecover.regularity import RecParams


def test_epsilon_rules():
    """Test the theoretical and simulation data-fit radii."""
    assert epsilon_default(1.0, 5) == pytest.approx(5.0)
    assert epsilon_default(0.01, 100) == pytest.approx(0.2236068, rel=1e-6)
    assert epsilon_experiment(0.01, 100) == pytest.approx(0.1132626, rel=1e-6)


def test_lambda_default_l1():
    """Test λ for q = 1, a = 3 at the reference configuration."""
    p = TuningParams(sigma=0.01, m=100, n=1024, a=3.0, q=1.0)

    choice = lambda_default(p)

    assert choice.lam == pytest.approx(0.0074466, rel=1e-4)
    # For q = 1 the rule reduces to the closed-form ℓ1 rule
    assert choice.lam == pytest.approx(l1_lambda(0.01, 100, 1024), rel=1e-12)
    assert choice.rho == pytest.approx(2.5e-4 / choice.lam + 1.0)


def test_lambda_default_variance_branch():
    """Test that a large σ activates the (5/2)σ² branch."""
    p = TuningParams(sigma=10.0, m=10000, n=2, a=3.0, q=1.0)

    assert lambda_default(p).lam == pytest.approx(250.0)


def test_tuning_params_validation():
    """Test the admissible ranges of the tuning inputs."""
    with pytest.raises(ConfigurationError):
        TuningParams(sigma=0.0, m=10, n=10)
    with pytest.raises(ConfigurationError):
        TuningParams(sigma=1.0, m=10, n=10, a=1.0)
    with pytest.raises(ConfigurationError):
        TuningParams(sigma=1.0, m=10, n=10, theta=1.0)
    with pytest.raises(ConfigurationError):
        UniversalConstants(tau=0.5)


def test_tuning_params_for_truth():
    """Test that the radius is the quasi-norm of the truth."""
    p = TuningParams.for_truth(np.array([1.0, 0.0, 4.0]), sigma=0.1, m=20, q=0.5)

    assert p.r == pytest.approx(9.0)
    assert p.n == 3
    assert p.to_dict()["q"] == 0.5


def test_theorem1_bound_example():
    """Test the constrained bound at s = 1, t = 4, q = 1/2, φ = 0.5."""
    value = theorem1_bound(0.5, 0.5, 1, 4, math.sqrt(0.05))

    assert value == pytest.approx((1.0 + 4.0 ** -3) * 0.8)

    with pytest.raises(ConfigurationError):
        theorem1_bound(0.0, 0.5, 1, 4, 0.1)


@pytest.mark.parametrize("s,t", [(1, 1), (3, 5)])
def test_regularized_bounds_reduce_to_l1_constants(s, t):
    """Test the q = 1, a = 3 reduction with φ² = m."""
    sigma, m, n, theta, b = 0.01, 200, 1024, 0.1, 0.5
    lam = l1_lambda(sigma, m, n, theta, b)
    unit = (1.0 + b) * (1.0 + theta) ** 2 * sigma ** 2 * s * math.log(n) / m

    bounds = theorem2_bounds(math.sqrt(m), m, 1.0, s, t, 3.0, lam)

    assert bounds.prediction == pytest.approx(288.0 * unit, rel=1e-12)
    assert bounds.oracle == pytest.approx(144.0 * unit, rel=1e-12)
    assert bounds.l2 == pytest.approx(288.0 * (1.0 + 9.0 * s / t) * unit, rel=1e-12)


@pytest.mark.parametrize("phi", [1.0, 0.7])
def test_random_design_bounds_reduce_to_l1_constants(phi):
    """Test the q = 1, a = 3 reduction of the Gaussian-design bounds."""
    sigma, m, n, s, t = 0.01, 300, 1024, 2, 4
    lam = l1_lambda(sigma, m, n)
    unit = sigma ** 2 * s * math.log(n) / m

    rp = theorem34_bounds(phi, m, 1.0, s, t, 3.0, lam, 0.1)["rp"]

    assert rp.prediction == pytest.approx(1152.0 * unit / phi ** 2, rel=1e-12)
    assert rp.oracle == pytest.approx(576.0 * unit / phi ** 2, rel=1e-12)
    assert rp.l2 == pytest.approx(4608.0 * (1.0 + 9.0 * s / t) * unit / phi ** 4, rel=1e-12)


def test_random_constrained_bound():
    """Test the Gaussian-design constrained bound."""
    cp = theorem34_bounds(0.5, 100, 0.5, 1, 4, 3.0, 0.01, math.sqrt(0.05))["cp_l2"]

    assert cp == pytest.approx(16.0 * (1.0 + 4.0 ** -3) * 0.05 / (100 * 0.25))


def test_probability_floors():
    """Test the noise-correlation floor and clipping."""
    floors = probability_floors(100, 1024)

    assert floors["B"] == pytest.approx(1.0 - 1.0 / math.sqrt(math.pi * math.log(1024)), rel=1e-12)
    assert floors["B"] == pytest.approx(0.7857, abs=1e-4)
    assert floors["A"] == pytest.approx(1.0 - math.exp(-100))
    # Check every floor is a probability
    assert all(0.0 <= v <= 1.0 for v in floors.values())
    # θ = 0 gives no column-norm guarantee
    assert floors["D"] == 0.0


def test_probability_floors_single_feature():
    """Test that n = 1 gives a zero correlation floor instead of an error."""
    floors = probability_floors(10, 1)

    assert floors["B"] == 0.0
    assert floors["A_and_B"] == 0.0


def test_sample_size_thresholds():
    """Test the sample-size formulas with unit constants."""
    rec = RecParams(q=1.0, s=1, t=1, a=1.0)

    out = sample_size_thresholds(rec, 1.0, 1.0, 100, 0.0)

    # (√2 + 1)²·ln 100
    assert out["rec_sample"] == pytest.approx((math.sqrt(2.0) + 1.0) ** 2 * math.log(100))
    assert math.isinf(out["x_theta_sample"])
    assert math.isinf(out["combined"])

    out = sample_size_thresholds(rec, 1.0, 1.0, 100, 0.5, UniversalConstants(c3=2.0))
    assert out["x_theta_sample"] == pytest.approx(8.0 * math.log(100))


def test_noise_norm_tail():
    """Test the chi-square tail and its validity range."""
    assert noise_norm_tail(10, 5) == pytest.approx(math.exp(-10.0))

    with pytest.raises(ConfigurationError):
        noise_norm_tail(10, 4)


def test_event_indicators():
    """Test the noise events for a zero draw and a mismatched configuration."""
    X = np.ones((4, 2))
    p = TuningParams(sigma=0.1, m=4, n=2)

    events = event_indicators(X, np.zeros(4), p)

    assert events.A and events.B and events.D
    assert events.correlation == 0.0
    assert events.max_column_norm == pytest.approx(2.0)

    with pytest.raises(DataShapeError):
        event_indicators(X, np.zeros(4), TuningParams(sigma=0.1, m=5, n=2))


def test_l1_from_lq_bound():
    """Test ‖δ‖₁ ≤ (2ρ)^{1−q}‖δ‖_q^q for a small vector."""
    result = l1_from_lq_bound([0.5, -0.2], 1.0, 0.5)

    assert result.holds
    assert result.lhs == pytest.approx(0.7)
    assert result.rhs == pytest.approx(math.sqrt(2.0) * (math.sqrt(0.5) + math.sqrt(0.2)))


def test_theorem_bounds_optional_moduli():
    """Test that missing moduli leave the corresponding bounds empty."""
    p = TuningParams(sigma=0.01, m=100, n=1024, q=0.5)

    empty = theorem_bounds(p, 1, 1)
    full = theorem_bounds(p, 1, 1, phi=2.0, phi_sigma_half=1.0, lam=0.05)

    assert empty.cp_l2_bound is None and empty.random_rp_l2 is None
    assert full.lam == 0.05
    assert full.cp_l2_bound == pytest.approx(theorem1_bound(2.0, 0.5, 1, 1, epsilon_default(0.01, 100)))
    assert full.rp_l2 == pytest.approx(theorem2_bounds(2.0, 100, 0.5, 1, 1, 3.0, 0.05).l2)
    assert 0.0 <= full.prob_floor <= 1.0


def test_bounds_report_contents():
    """Test the JSON report labels and optional sections."""
    p = TuningParams(sigma=0.01, m=100, n=1024, a=3.0, q=1.0)

    report = bounds_report(p, s=1, t=1, phi_sigma_half=1.0)

    assert report["label"] == "up to universal constants"
    assert report["lambda"] == pytest.approx(0.0074466, rel=1e-4)
    assert report["epsilon_experiment"] == pytest.approx(0.1132626, rel=1e-6)
    assert "sample_size_thresholds" in report
    assert report["bounds"]["cp_l2_bound"] is None
    assert "sample_size_thresholds" not in bounds_report(p)
