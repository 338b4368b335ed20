"""
ℓq penalty for 0 < q < 1.

Closed-form thresholding is used for q = 1/2 (half thresholding) and q = 2/3;
other exponents solve the interior stationarity equation by a safeguarded
Newton iteration. Every branch ends with an explicit comparison against 0,
so the returned point is a global minimizer of the scalar problem.
"""

import logging

import numpy as np

from lqrecover.penalties.base import BasePenalty


logger = logging.getLogger(__name__)

_NEWTON_MAX_ITERS = 100


def _half_threshold(w: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Nonzero stationary point of (1/2)(u − w)² + τ√u, or 0 below threshold."""
    u = np.zeros_like(w)
    active = w > 1.5 * tau ** (2.0 / 3.0) * (1.0 - 1e-12)
    if np.any(active):
        ww, tt = w[active], tau[active]
        phi = np.arccos(np.clip((tt / 4.0) * (ww / 3.0) ** -1.5, -1.0, 1.0))
        u[active] = (2.0 / 3.0) * ww * (1.0 + np.cos(2.0 * np.pi / 3.0 - 2.0 * phi / 3.0))
    return u


def _two_thirds_threshold(w: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Nonzero stationary point of (1/2)(u − w)² + τu^{2/3}, or 0 below threshold."""
    u = np.zeros_like(w)
    lam = 2.0 * tau
    active = w > (2.0 / 3.0) * (3.0 * lam ** 3) ** 0.25 * (1.0 - 1e-12)
    if np.any(active):
        ww, ll = w[active], lam[active]
        phi = np.arccosh(np.maximum(27.0 * ww ** 2 / (16.0 * ll ** 1.5), 1.0))
        big_a = (2.0 / np.sqrt(3.0)) * ll ** 0.25 * np.sqrt(np.cosh(phi / 3.0))
        inner = np.maximum(2.0 * ww / big_a - big_a ** 2, 0.0)
        u[active] = ((big_a + np.sqrt(inner)) / 2.0) ** 3
    return u


def _newton_threshold(w: np.ndarray, tau: np.ndarray, q: float) -> np.ndarray:
    """
    Largest root of g(u) = u − w + τq·u^{q−1} on [ū, w].

    ū = (τq(1−q))^{1/(2−q)} is the inflection point of the scalar objective;
    g is increasing and convex beyond it, so Newton started at u = w (where
    g > 0) decreases monotonically onto the root.
    """
    u = np.zeros_like(w)
    u_bar = (tau * q * (1.0 - q)) ** (1.0 / (2.0 - q))
    active = w > u_bar
    if not np.any(active):
        return u
    ww, tt, lo = w[active], tau[active], u_bar[active]
    x = ww.copy()
    for _ in range(_NEWTON_MAX_ITERS):
        g = x - ww + tt * q * x ** (q - 1.0)
        dg = 1.0 + tt * q * (q - 1.0) * x ** (q - 2.0)
        step = np.divide(g, dg, out=np.zeros_like(g), where=dg > 0)
        x_new = np.clip(x - step, lo, ww)
        if np.max(np.abs(x_new - x)) <= 1e-15 * np.max(ww):
            x = x_new
            break
        x = x_new
    else:
        logger.debug("Newton threshold hit the iteration cap for q=%s", q)
    u[active] = x
    return u


class LqPenalty(BasePenalty):
    """ρ(x) = |x|^q with 0 < q < 1."""

    def rho(self, x):
        return np.abs(np.asarray(x, dtype=float)) ** self.spec.q

    def shrink(self, w, tau):
        q = self.spec.q
        if np.isclose(q, 0.5, rtol=0.0, atol=1e-12):
            u = _half_threshold(w, tau)
        elif np.isclose(q, 2.0 / 3.0, rtol=0.0, atol=1e-12):
            u = _two_thirds_threshold(w, tau)
        else:
            u = _newton_threshold(w, tau, q)
        keep = 0.5 * (u - w) ** 2 + tau * u ** q < 0.5 * w ** 2
        return np.where(keep, u, 0.0)
