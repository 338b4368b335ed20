"""
ℓ0 penalty (hard thresholding).
"""

import numpy as np

from lqrecover.penalties.base import BasePenalty


class L0Penalty(BasePenalty):
    """ρ(x) = 1{x ≠ 0}."""

    def rho(self, x):
        return (np.asarray(x, dtype=float) != 0).astype(float)

    def shrink(self, w, tau):
        # keep v when (1/2)v² > τ
        return np.where(w * w > 2.0 * tau, w, 0.0)
