"""
Tests for quasi-norms, index sets and the cone test.
"""

import numpy as np
import pytest

from lqrecover.core import (
    ConeParams,
    IndexSet,
    RegressionInstance,
    batch_partition,
    check_problem,
    cone_mask,
    cone_membership,
    lq_power,
    lq_quasi_norm,
    top_index_set,
)
from lqrecover.exceptions import ConfigurationError, DataShapeError


def test_lq_power_and_quasi_norm():
    """Test Σ|β_i|^q and its 1/q power for the special exponents."""
    beta = [1.0, -4.0, 0.0]

    assert lq_power(beta, 0.5) == pytest.approx(3.0)
    assert lq_quasi_norm(beta, 0.5) == pytest.approx(9.0)
    assert lq_quasi_norm(beta, 1.0) == pytest.approx(5.0)

    # q = 0 counts nonzeros
    assert lq_power(beta, 0) == 2
    assert lq_quasi_norm(beta, 0) == 2


def test_lq_power_rejects_bad_exponent():
    """Test that exponents outside {0} ∪ (0, 1] are rejected."""
    with pytest.raises(ConfigurationError):
        lq_power([1.0, 2.0], 1.5)
    with pytest.raises(ConfigurationError):
        lq_power([1.0, 2.0], -0.5)


def test_lq_power_rejects_non_finite():
    """Test that NaN entries raise a shape error."""
    with pytest.raises(DataShapeError):
        lq_power([1.0, np.nan], 0.5)


def test_index_set_conversions():
    """Test 1-based construction, complement and masks."""
    J = IndexSet.from_one_based([3, 1], n=5)

    assert J.indices == (0, 2)
    assert J.to_one_based() == [1, 3]
    assert J.complement().indices == (1, 3, 4)
    assert list(J.mask()) == [True, False, True, False, False]
    assert 2 in J and 1 not in J
    assert len(IndexSet.empty(4)) == 0


def test_index_set_rejects_out_of_range():
    """Test bounds checking of indices."""
    with pytest.raises(ConfigurationError):
        IndexSet((0, 5), n=5)
    with pytest.raises(ConfigurationError):
        IndexSet((2, 1), n=5)


def test_top_index_set_breaks_ties_by_lower_index():
    """Test the ranking of the complement by magnitude."""
    delta = np.array([5.0, -1.0, 3.0, -3.0, 0.5])
    J = IndexSet((0,), 5)

    assert top_index_set(delta, J, 1).indices == (2,)
    assert top_index_set(delta, J, 2).indices == (2, 3)


def test_batch_partition_covers_complement():
    """Test that the batches are disjoint and cover J^c in ranked order."""
    delta = np.array([5.0, -1.0, 3.0, -3.0, 0.5])
    J = IndexSet((0,), 5)

    batches = batch_partition(delta, J, 2)

    assert [b.indices for b in batches] == [(2, 3), (1, 4)]
    assert batches[0] == top_index_set(delta, J, 2)


def test_top_index_set_rejects_large_t():
    """Test that t may not exceed |J^c|."""
    with pytest.raises(ConfigurationError):
        top_index_set(np.ones(3), IndexSet((0,), 3), 3)


def test_cone_membership_kernel_direction():
    """Test the cone test on the kernel direction of the 2×3 design."""
    delta = np.array([-2.0, 1.0, 1.0])

    # ℓ1: off-support mass 2 equals on-support mass 2
    assert cone_membership(delta, ConeParams(1.0, 1, 1.0))
    # ℓ1/2: off-support mass 2 exceeds √2
    assert not cone_membership(delta, ConeParams(0.5, 1, 1.0))
    assert cone_membership(delta, ConeParams(0.5, 1, 3.0))


def test_cone_mask_rows():
    """Test row-wise membership for a stack of vectors."""
    deltas = np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0]])

    mask = cone_mask(deltas, ConeParams(1.0, 1, 1.0))

    assert mask.tolist() == [True, False, True]


def test_regression_instance_from_parts():
    """Test that y is assembled from X, β* and e."""
    X = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
    inst = RegressionInstance.from_parts(X, [0.0, 3.0], [0.1, 0.0, -0.1], sigma=0.1)

    assert np.allclose(inst.y, [0.1, 6.0, 2.9])
    assert inst.m == 3 and inst.n == 2
    assert inst.support.indices == (1,)
    assert inst.s == 1


def test_regression_instance_rejects_inconsistent_y():
    """Test that a y not equal to Xβ* + e is rejected."""
    X = np.eye(2)
    with pytest.raises(DataShapeError):
        RegressionInstance(X=X, beta_star=[1.0, 0.0], e=[0.0, 0.0], y=[0.0, 1.0], sigma=0.0)


def test_check_problem_names_dimensions():
    """Test that a length mismatch reports both shapes."""
    with pytest.raises(DataShapeError, match="3x2"):
        check_problem(np.ones((3, 2)), np.ones(4))
