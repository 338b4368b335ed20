"""
Reproducible Monte-Carlo experiments: instance generation, cross-validation,
support-recovery metrics, the sample-size sweep and the 2×3 bound-coverage run.
"""

from lqrecover.experiments.cross_validation import (
    CrossValidationResult,
    cross_validate_lambda,
    default_lambda_grid,
    fold_indices,
)
from lqrecover.experiments.example1 import (
    EXAMPLE1_BETA,
    EXAMPLE1_DESIGN,
    Example1Report,
    example1_lambda_grid,
    verify_example1,
)
from lqrecover.experiments.generate import derive_seed, draw_sparse_vector, generate_instance
from lqrecover.experiments.metrics import (
    confidence_half_width,
    l2_error_sq,
    prediction_error,
    support_metrics,
)
from lqrecover.experiments.sweep import (
    SweepResult,
    TrialReport,
    aggregate_trials,
    design_modulus_floor,
    dominant_property_rate,
    run_sweep,
    run_trial,
    tables_layout,
    theory_tuned,
    trials_frame,
    write_sweep_outputs,
)


__all__ = [
    "derive_seed",
    "draw_sparse_vector",
    "generate_instance",
    "support_metrics",
    "l2_error_sq",
    "prediction_error",
    "confidence_half_width",
    "CrossValidationResult",
    "cross_validate_lambda",
    "default_lambda_grid",
    "fold_indices",
    "TrialReport",
    "SweepResult",
    "run_trial",
    "run_sweep",
    "aggregate_trials",
    "trials_frame",
    "tables_layout",
    "dominant_property_rate",
    "theory_tuned",
    "design_modulus_floor",
    "write_sweep_outputs",
    "EXAMPLE1_DESIGN",
    "EXAMPLE1_BETA",
    "Example1Report",
    "example1_lambda_grid",
    "verify_example1",
]
