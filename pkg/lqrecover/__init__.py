"""
lqrecover - sparse linear regression with ℓq penalties (0 < q ≤ 1).

The library solves ℓq-regularized and ℓq-constrained least squares, checks
the q-restricted eigenvalue condition of a design, evaluates the closed-form
recovery bounds and their tuning rules, and runs reproducible Monte-Carlo
experiments comparing ℓ0, ℓ1/2, ℓ2/3, ℓ1, SCAD and MCP.

Basic usage:
    >>> import numpy as np
    >>> from lqrecover import PenaltySpec, prox_gradient_solve
    >>> X = np.random.default_rng(0).standard_normal((50, 100))
    >>> y = X[:, :3] @ np.ones(3)
    >>> result = prox_gradient_solve(X, y, PenaltySpec.for_q(0.5, 0.01))

Checking a design:
    >>> from lqrecover import RecParams, certify
    >>> report = certify(np.array([[2, 3, 1], [2, 1, 3]]), RecParams(q=0.5, s=1, t=1, a=1))
"""

from lqrecover.bounds import (
    TheoremBounds,
    TuningParams,
    UniversalConstants,
    bounds_report,
    epsilon_default,
    epsilon_experiment,
    lambda_default,
    probability_floors,
    sample_size_thresholds,
    theorem1_bound,
    theorem2_bounds,
    theorem34_bounds,
    theorem_bounds,
)
from lqrecover.config import CovarianceSpec, ExperimentConfig, MethodSpec, SearchConfig, SolverOptions
from lqrecover.core import (
    ConeParams,
    IndexSet,
    RegressionInstance,
    batch_partition,
    cone_membership,
    lq_power,
    lq_quasi_norm,
    top_index_set,
)
from lqrecover.exceptions import (
    CombinatorialBudgetError,
    ConfigurationError,
    DataShapeError,
    DivergenceError,
    LqRecoverError,
    MatrixFileError,
    SolverError,
)
from lqrecover.experiments import (
    cross_validate_lambda,
    dominant_property_rate,
    generate_instance,
    run_sweep,
    support_metrics,
    verify_example1,
)
from lqrecover.logging import configure_logging, get_logger
from lqrecover.matrix_files import RunManifest, read_matrix, write_matrix
from lqrecover.penalties import PenaltyKind, PenaltySpec, prox_penalty
from lqrecover.regularity import (
    CertificationStatus,
    RecParams,
    certify,
    check_sufficient_conditions,
    rec_modulus_estimate,
    restricted_isometry_constant,
    restricted_orthogonality_constant,
    sparse_eigenvalues,
)
from lqrecover.solvers import SolveResult, global_solve_tiny, irl1_constrained_solve, prox_gradient_solve

__all__ = [
    # Core types
    "IndexSet",
    "ConeParams",
    "RegressionInstance",
    "lq_power",
    "lq_quasi_norm",
    "top_index_set",
    "batch_partition",
    "cone_membership",

    # Penalties and solvers
    "PenaltyKind",
    "PenaltySpec",
    "prox_penalty",
    "SolveResult",
    "prox_gradient_solve",
    "irl1_constrained_solve",
    "global_solve_tiny",

    # Regularity
    "RecParams",
    "CertificationStatus",
    "sparse_eigenvalues",
    "restricted_isometry_constant",
    "restricted_orthogonality_constant",
    "rec_modulus_estimate",
    "check_sufficient_conditions",
    "certify",

    # Bounds
    "TuningParams",
    "UniversalConstants",
    "TheoremBounds",
    "epsilon_default",
    "epsilon_experiment",
    "lambda_default",
    "theorem1_bound",
    "theorem2_bounds",
    "theorem34_bounds",
    "probability_floors",
    "sample_size_thresholds",
    "theorem_bounds",
    "bounds_report",

    # Experiments
    "generate_instance",
    "support_metrics",
    "cross_validate_lambda",
    "run_sweep",
    "verify_example1",
    "dominant_property_rate",

    # Configuration
    "SolverOptions",
    "SearchConfig",
    "CovarianceSpec",
    "MethodSpec",
    "ExperimentConfig",

    # Exceptions
    "LqRecoverError",
    "ConfigurationError",
    "DataShapeError",
    "CombinatorialBudgetError",
    "SolverError",
    "DivergenceError",
    "MatrixFileError",

    # Utilities
    "RunManifest",
    "read_matrix",
    "write_matrix",
    "configure_logging",
    "get_logger",
]

__version__ = "0.1.0"

# Configure basic logging
configure_logging()
