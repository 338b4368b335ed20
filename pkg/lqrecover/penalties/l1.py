"""
ℓ1 penalty (soft thresholding).
"""

import numpy as np

from lqrecover.penalties.base import BasePenalty


class L1Penalty(BasePenalty):
    """ρ(x) = |x|."""

    def rho(self, x):
        return np.abs(np.asarray(x, dtype=float))

    def shrink(self, w, tau):
        return np.maximum(w - tau, 0.0)
