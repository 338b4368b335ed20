"""
Tests for design-matrix constants and the restricted eigenvalue modulus.
"""

import numpy as np
import pytest

from lqrecover.config import SearchConfig
from lqrecover.exceptions import CombinatorialBudgetError, ConfigurationError
from lqrecover.regularity import (
    CertificationStatus,
    ConditionStatus,
    RecParams,
    analytic_modulus_bounds,
    certify,
    check_sufficient_conditions,
    mutual_incoherence,
    rec_modulus_estimate,
    restricted_isometry_constant,
    restricted_orthogonality_constant,
    rip_constants,
    sampled_sparse_eigenvalues,
    sparse_eigenvalues,
)


def test_rec_params_validation():
    """Test the admissible range of (q, s, t, a)."""
    with pytest.raises(ConfigurationError):
        RecParams(q=0.5, s=2, t=1, a=1.0)
    with pytest.raises(ConfigurationError):
        RecParams(q=1.5, s=1, t=1, a=1.0)
    with pytest.raises(ConfigurationError):
        RecParams(q=0.5, s=1, t=1, a=0.0)
    with pytest.raises(ConfigurationError):
        RecParams(q=0.5, s=2, t=2, a=1.0).check_dimension(3)


def test_sparse_eigenvalues_diagonal():
    """Test the extremes over principal submatrices of a diagonal matrix."""
    lo, hi = sparse_eigenvalues(np.diag([1.0, 2.0, 3.0, 4.0, 5.0]), 2)

    assert lo == pytest.approx(1.0)
    assert hi == pytest.approx(5.0)


def test_sparse_eigenvalues_budget():
    """Test that enumeration refuses to exceed its budget."""
    with pytest.raises(CombinatorialBudgetError) as exc_info:
        sparse_eigenvalues(np.eye(30), 10, budget=100)

    # Check the required count is C(30, 10)
    assert exc_info.value.required == 30045015
    assert exc_info.value.budget == 100


def test_sampled_eigenvalues_bracket_exact(rng):
    """Test that Monte-Carlo values lie inside the exact range."""
    X = rng.standard_normal((10, 8))
    G = X.T @ X
    lo, hi = sparse_eigenvalues(G, 3)

    sampled = sampled_sparse_eigenvalues(G, 3, num_samples=200, seed=1)

    assert sampled.sigma_min_upper >= lo - 1e-9
    assert sampled.sigma_max_lower <= hi + 1e-9
    assert "not exact" in sampled.label


def test_isometry_and_orthogonality_constants(example_design):
    """Test η_s and θ_{s,t} on orthonormal and on the 2×3 design."""
    assert restricted_isometry_constant(np.eye(4), 2) == pytest.approx(0.0)
    assert restricted_orthogonality_constant(np.eye(4), 1, 2) == pytest.approx(0.0)

    # XᵀX = [[8, 8, 8], [8, 10, 6], [8, 6, 10]]
    assert restricted_orthogonality_constant(example_design, 1, 1) == pytest.approx(8.0)
    assert restricted_isometry_constant(example_design, 1) == pytest.approx(9.0)


def test_mutual_incoherence(example_design):
    """Test the coherence of the column-normalized design."""
    mic, scales = mutual_incoherence(example_design)

    assert mic == pytest.approx(8.0 / np.sqrt(80.0))
    assert np.allclose(scales, [np.sqrt(8.0), np.sqrt(10.0), np.sqrt(10.0)])


def test_rip_constants_table(example_design):
    """Test the η/θ table and the lattice θ_{s,t} ≤ η_{s+t}."""
    table = rip_constants(example_design, 2)

    assert sorted(table.eta) == [1, 2]
    assert list(table.theta) == [(1, 1)]
    assert table.eta[1] == pytest.approx(9.0)
    assert table.theta[(1, 1)] == pytest.approx(8.0)
    assert table.theta[(1, 1)] <= table.eta[2]
    assert table.to_dict()["theta"] == {"1,1": table.theta[(1, 1)]}


def test_analytic_modulus_bounds_identity():
    """Test the eigenvalue sandwich on the identity, where the batch spill is 1."""
    lower, upper = analytic_modulus_bounds(np.eye(4), RecParams(q=1.0, s=1, t=1, a=1.0))

    assert lower == pytest.approx(0.0)
    assert upper == pytest.approx(2.0)


def test_modulus_zero_for_l1_cone(example_design):
    """Test that the kernel direction (−2, 1, 1) makes the ℓ1 modulus vanish."""
    est = rec_modulus_estimate(example_design, RecParams(q=1.0, s=1, t=1, a=1.0))

    assert est.certified is CertificationStatus.ZERO
    assert est.modulus_upper == 0.0
    direction = np.array([-2.0, 1.0, 1.0]) / np.sqrt(6.0)
    # Check the witness is the kernel direction up to sign
    assert abs(float(est.witness @ direction)) == pytest.approx(1.0, abs=1e-9)
    assert est.kernel_dim == 1


def test_modulus_positive_for_half_cone(example_design):
    """Test that ℓ1/2 excludes the kernel, so the modulus is certified positive."""
    est = rec_modulus_estimate(
        example_design, RecParams(q=0.5, s=1, t=1, a=1.0), SearchConfig(num_starts=50, max_iters=300)
    )

    assert est.certified is CertificationStatus.POSITIVE
    assert est.modulus_upper > 0
    # Check the search value lies inside the analytic sandwich
    assert est.analytic_lower - 1e-9 <= est.modulus_upper <= est.analytic_upper + 1e-9


def test_modulus_sandwich_random_design(rng):
    """Test the sandwich on a random wide design."""
    X = rng.standard_normal((8, 10))

    est = rec_modulus_estimate(X, RecParams(q=0.5, s=1, t=2, a=1.0), SearchConfig(num_starts=40, max_iters=200))

    assert est.analytic_lower - 1e-9 <= est.modulus_upper <= est.analytic_upper + 1e-9
    expected = CertificationStatus.POSITIVE if est.analytic_lower > 0 else CertificationStatus.UNKNOWN
    assert est.certified is expected
    assert est.kernel_dim == 2


def test_modulus_positive_from_analytic_lower(mocker):
    """Test that a positive eigenvalue lower bound certifies a design with a two-dimensional kernel."""
    X = np.hstack([np.eye(3), 0.1 * np.ones((3, 2))])
    rec = RecParams(q=0.5, s=1, t=1, a=0.5)
    search = SearchConfig(num_starts=30, max_iters=200)

    est = rec_modulus_estimate(X, rec, search)

    # Columns 4 and 5 coincide, so the exact lower bound is negative
    assert est.kernel_dim == 2
    assert est.analytic_lower < 0
    assert est.certified is CertificationStatus.UNKNOWN

    mocker.patch("lqrecover.regularity.analytic_modulus_bounds", return_value=(0.05, 10.0))
    est = rec_modulus_estimate(X, rec, search)

    assert est.certified is CertificationStatus.POSITIVE
    assert est.analytic_lower == 0.05


def test_modulus_identity_design():
    """Test that the identity has modulus one."""
    est = rec_modulus_estimate(np.eye(6), RecParams(q=0.5, s=1, t=2, a=1.0), SearchConfig(num_starts=20, max_iters=100))

    assert est.modulus_upper == pytest.approx(1.0, abs=1e-6)
    assert est.certified is CertificationStatus.POSITIVE


def test_sufficient_conditions_identity():
    """Test that every condition holds for an orthonormal design."""
    result = check_sufficient_conditions(np.eye(6), RecParams(q=0.5, s=1, t=2, a=1.0))

    assert result.unit_diagonal
    for name in ("a", "b", "c"):
        assert result[name].status is ConditionStatus.TRUE
    assert result.implied_phi_lower["c"] == pytest.approx(1.0)
    assert result.any_true


def test_sufficient_conditions_without_unit_diagonal(example_design):
    """Test that the coherence conditions are skipped without a unit diagonal."""
    result = check_sufficient_conditions(example_design, RecParams(q=0.5, s=1, t=1, a=1.0))

    assert result["c"].status is ConditionStatus.NOT_APPLICABLE
    assert result.normalized_mic == pytest.approx(8.0 / np.sqrt(80.0))
    with pytest.raises(KeyError):
        result["d"]


def test_certify_report(example_design):
    """Test the combined certification report."""
    report = certify(example_design, RecParams(q=0.5, s=1, t=1, a=1.0), SearchConfig(num_starts=20, max_iters=100))

    data = report.to_dict()

    assert data["rows"] == 2 and data["cols"] == 3
    assert data["estimate"]["certified"] == "POSITIVE"
    assert data["constants"]["sigma_max(s)"] == pytest.approx(10.0)
    assert {c["name"] for c in data["sufficient_conditions"]["conditions"]} == {
        "a", "a_circ", "b", "b_circ", "c", "c_circ",
    }
