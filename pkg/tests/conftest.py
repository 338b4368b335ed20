"""
Shared fixtures.
"""

import numpy as np
import pytest


@pytest.fixture
def example_design():
    """The 2×3 design whose kernel is spanned by (−2, 1, 1)."""
    return np.array([[2.0, 3.0, 1.0], [2.0, 1.0, 3.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sparse_problem(rng):
    """A well-conditioned 60×20 noiseless problem with three nonzero coefficients."""
    X = rng.standard_normal((60, 20))
    beta = np.zeros(20)
    beta[[2, 7, 11]] = [1.5, -2.0, 1.0]
    return X, X @ beta, beta
