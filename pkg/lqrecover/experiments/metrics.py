"""
Per-trial error and support-recovery metrics.
"""

import math
from typing import Sequence, Tuple

import numpy as np
import numpy.typing as npt

from lqrecover.core import as_matrix, as_vector
from lqrecover.exceptions import DataShapeError

Z_95 = 1.96


def support_metrics(
    beta_hat: npt.ArrayLike, beta_star: npt.ArrayLike, support_tol: float = 1e-4
) -> Tuple[float, float]:
    """
    Sensitivity and specificity of the estimated support {i : |β̂_i| > support_tol}.

    sensitivity = TP/(TP+FN), 1 when β* has no nonzero entry;
    specificity = TN/(TN+FP), 1 when β* has no zero entry.
    """
    beta_hat = as_vector(beta_hat, "beta_hat")
    beta_star = as_vector(beta_star, "beta_star")
    if beta_hat.shape != beta_star.shape:
        raise DataShapeError(f"beta_hat has length {beta_hat.size} but beta_star has length {beta_star.size}")
    selected = np.abs(beta_hat) > support_tol
    truth = beta_star != 0
    tp = int(np.sum(selected & truth))
    fn = int(np.sum(~selected & truth))
    tn = int(np.sum(~selected & ~truth))
    fp = int(np.sum(selected & ~truth))
    sensitivity = tp / (tp + fn) if tp + fn else 1.0
    specificity = tn / (tn + fp) if tn + fp else 1.0
    return sensitivity, specificity


def l2_error_sq(beta_hat: npt.ArrayLike, beta_star: npt.ArrayLike) -> float:
    diff = as_vector(beta_hat, "beta_hat") - as_vector(beta_star, "beta_star")
    return float(diff @ diff)


def prediction_error(X: npt.ArrayLike, beta_hat: npt.ArrayLike, beta_star: npt.ArrayLike) -> float:
    """(1/m)‖X(β̂ − β*)‖²."""
    X = as_matrix(X)
    n = X.shape[1]
    r = X @ (as_vector(beta_hat, "beta_hat", n) - as_vector(beta_star, "beta_star", n))
    return float(r @ r) / X.shape[0]


def confidence_half_width(values: Sequence[float]) -> float:
    """Normal-approximation 95% half-width 1.96·sd/√k; NaN for fewer than two values."""
    arr = np.asarray(values, dtype=float)
    arr = arr[np.isfinite(arr)]
    if arr.size < 2:
        return math.nan
    return float(Z_95 * np.std(arr, ddof=1) / math.sqrt(arr.size))
