"""
SCAD and MCP penalties.

Both are piecewise quadratic in |x|, so the scalar prox is found by taking
the clipped stationary point of every piece plus the breakpoints and keeping
the candidate with the lowest objective. When the step is small enough for
the scalar problem to be convex this reduces to the familiar closed forms.
"""

import numpy as np

from lqrecover.penalties.base import BasePenalty


class ScadPenalty(BasePenalty):
    """Smoothly clipped absolute deviation with parameter ``scad_a``."""

    def rho(self, x):
        lam, a = self.lam, self.spec.scad_a
        u = np.abs(np.asarray(x, dtype=float))
        p = np.where(
            u <= lam,
            lam * u,
            np.where(
                u <= a * lam,
                (2.0 * a * lam * u - u * u - lam * lam) / (2.0 * (a - 1.0)),
                (a + 1.0) * lam * lam / 2.0,
            ),
        )
        return p / lam

    def shrink(self, w, tau):
        lam, a = self.lam, self.spec.scad_a
        t = tau / lam
        denom = a - 1.0 - t
        middle = np.divide((a - 1.0) * w - t * a * lam, denom,
                           out=np.full_like(w, lam), where=denom != 0)
        candidates = (
            np.zeros_like(w),
            np.clip(w - t * lam, 0.0, lam),
            np.clip(middle, lam, a * lam),
            np.full_like(w, lam),
            np.full_like(w, a * lam),
            np.maximum(w, a * lam),
        )
        return self._best_of(w, tau, candidates)


class McpPenalty(BasePenalty):
    """Minimax concave penalty with parameter ``mcp_gamma``."""

    def rho(self, x):
        lam, gamma = self.lam, self.spec.mcp_gamma
        u = np.abs(np.asarray(x, dtype=float))
        p = np.where(u <= gamma * lam, lam * u - u * u / (2.0 * gamma), gamma * lam * lam / 2.0)
        return p / lam

    def shrink(self, w, tau):
        lam, gamma = self.lam, self.spec.mcp_gamma
        t = tau / lam
        denom = 1.0 - t / gamma
        inner = np.divide(w - t * lam, denom, out=np.zeros_like(w), where=denom != 0)
        candidates = (
            np.zeros_like(w),
            np.clip(inner, 0.0, gamma * lam),
            np.full_like(w, gamma * lam),
            np.maximum(w, gamma * lam),
        )
        return self._best_of(w, tau, candidates)
