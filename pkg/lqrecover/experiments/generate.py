"""
Seeded generation of sparse regression instances.
"""

import hashlib
import logging
from typing import Optional

import numpy as np

from lqrecover.config import CovarianceKind, CovarianceSpec
from lqrecover.core import RegressionInstance
from lqrecover.exceptions import ConfigurationError


logger = logging.getLogger(__name__)

_SEED_BYTES = 8


def derive_seed(*parts: object) -> int:
    """
    Stable 63-bit seed from any sequence of printable parts.

    BLAKE2b over the ``repr`` of the parts, so the value does not depend on
    the process, the platform or the order in which work items run.
    """
    digest = hashlib.blake2b(digest_size=_SEED_BYTES)
    for part in parts:
        digest.update(repr(part).encode("utf-8"))
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest(), "little") >> 1


def draw_sparse_vector(n: int, s: int, rng: np.random.Generator, min_magnitude: float = 0.1) -> np.ndarray:
    """s standard-normal entries at uniformly random positions, redrawn while |value| < min_magnitude."""
    if not 0 <= s <= n:
        raise ConfigurationError(f"s must lie in [0, n], got s={s}, n={n}")
    beta = np.zeros(n)
    positions = rng.choice(n, size=s, replace=False)
    values = rng.standard_normal(s)
    small = np.abs(values) < min_magnitude
    while np.any(small):
        values[small] = rng.standard_normal(int(small.sum()))
        small = np.abs(values) < min_magnitude
    beta[positions] = values
    return beta


def generate_instance(
    m: int,
    n: int,
    s: int,
    sigma: float,
    cov: Optional[CovarianceSpec] = None,
    seed: int = 0,
    beta_min_magnitude: float = 0.1,
) -> RegressionInstance:
    """
    Draw y = Xβ* + e with Gaussian rows of X and Gaussian noise.

    Args:
        m: Sample size.
        n: Number of features.
        s: Number of nonzero entries of β*.
        sigma: Noise standard deviation (0 gives a noiseless instance).
        cov: Row covariance Σ; identity by default.
        seed: Seed of the whole draw; equal seeds give bit-identical instances.
        beta_min_magnitude: Nonzero entries of β* are at least this large.

    Returns:
        RegressionInstance with X rows ~ N(0, Σ), e ~ N(0, σ²I).

    Raises:
        ConfigurationError: If s > n, sigma < 0 or Σ is not PSD.
    """
    if s > n:
        raise ConfigurationError(f"s={s} exceeds n={n}")
    if sigma < 0:
        raise ConfigurationError(f"sigma must be nonnegative, got {sigma}")
    cov = cov or CovarianceSpec()
    rng = np.random.default_rng(seed)

    X = rng.standard_normal((m, n))
    if cov.kind is not CovarianceKind.IDENTITY:
        X = X @ cov.sqrt_for(n)
    beta_star = draw_sparse_vector(n, s, rng, beta_min_magnitude)
    e = sigma * rng.standard_normal(m)
    logger.debug("generated %dx%d instance with s=%d, sigma=%g, seed=%d", m, n, s, sigma, seed)
    return RegressionInstance.from_parts(X, beta_star, e, sigma)
