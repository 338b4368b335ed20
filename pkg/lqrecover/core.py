"""
Shared domain types, ℓq quasi-norm utilities and index-set machinery.

Indices are 0-based in every array and ``IndexSet``; reports and files use
the 1-based form returned by ``IndexSet.to_one_based``.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from typing_extensions import Self

from lqrecover.exceptions import ConfigurationError, DataShapeError


logger = logging.getLogger(__name__)

DenseMatrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]

# Relative slack used when testing the cone inequality on computed vectors.
CONE_RTOL = 1e-9


def as_matrix(X: npt.ArrayLike, name: str = "X") -> DenseMatrix:
    """
    Validate and convert a design matrix.

    Args:
        X: Array-like with two dimensions.
        name: Name used in error messages.

    Returns:
        A float64 array of shape (m, n).

    Raises:
        DataShapeError: If X is not a non-empty 2-D array of finite numbers.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataShapeError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataShapeError(f"{name} contains non-finite entries")
    return arr


def as_vector(v: npt.ArrayLike, name: str = "vector", length: Optional[int] = None) -> Vector:
    """
    Validate and convert a vector, optionally checking its length.

    Raises:
        DataShapeError: On wrong dimensionality, length or non-finite entries.
    """
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DataShapeError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise DataShapeError(f"{name} has length {arr.shape[0]}, expected {length}")
    if not np.all(np.isfinite(arr)):
        raise DataShapeError(f"{name} contains non-finite entries")
    return arr


def check_problem(X: npt.ArrayLike, y: npt.ArrayLike) -> Tuple[DenseMatrix, Vector]:
    """Validate a (design, observation) pair and return them as arrays."""
    X = as_matrix(X)
    y = np.asarray(y, dtype=float)
    if y.ndim == 2 and 1 in y.shape:
        y = y.reshape(-1)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise DataShapeError(
            f"Observation has shape {y.shape} but the design has {X.shape[0]} rows "
            f"(design is {X.shape[0]}x{X.shape[1]})"
        )
    return X, as_vector(y, "y")


@dataclass(frozen=True)
class IndexSet:
    """Sorted distinct 0-based indices into a vector of length ``n``."""
    indices: Tuple[int, ...]
    n: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if self.n < 1:
            raise ConfigurationError(f"IndexSet dimension must be positive, got {self.n}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ConfigurationError(f"IndexSet indices must be strictly increasing, got {idx}")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise ConfigurationError(f"IndexSet indices {idx} out of bounds for n={self.n}")

    @classmethod
    def from_iterable(cls, indices: Iterable[int], n: int) -> Self:
        """Build from any iterable of 0-based indices (duplicates dropped)."""
        return cls(tuple(sorted({int(i) for i in indices})), n)

    @classmethod
    def from_one_based(cls, indices: Iterable[int], n: int) -> Self:
        """Build from 1-based indices as written in reports."""
        return cls.from_iterable((int(i) - 1 for i in indices), n)

    @classmethod
    def empty(cls, n: int) -> Self:
        return cls((), n)

    def complement(self) -> "IndexSet":
        return IndexSet(tuple(np.flatnonzero(~self.mask()).tolist()), self.n)

    def mask(self) -> npt.NDArray[np.bool_]:
        out = np.zeros(self.n, dtype=bool)
        out[list(self.indices)] = True
        return out

    def as_array(self) -> npt.NDArray[np.intp]:
        return np.asarray(self.indices, dtype=np.intp)

    def to_one_based(self) -> List[int]:
        return [i + 1 for i in self.indices]

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, item: object) -> bool:
        return item in self.indices


@dataclass(frozen=True)
class ConeParams:
    """Parameters (q, s, a) of the cone C_q(s, a)."""
    q: float
    s: int
    a: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ConfigurationError(f"q must lie in (0, 1], got {self.q}")
        if int(self.s) != self.s or self.s < 1:
            raise ConfigurationError(f"s must be a positive integer, got {self.s}")
        if not self.a > 0.0:
            raise ConfigurationError(f"a must be positive, got {self.a}")

    def check_dimension(self, n: int) -> None:
        if self.s > n:
            raise ConfigurationError(f"s={self.s} exceeds the dimension n={n}")


@dataclass
class RegressionInstance:
    """
    One draw of the linear model y = X·beta_star + e.

    Attributes:
        X: Design matrix of shape (m, n).
        beta_star: True coefficient vector of length n.
        e: Noise vector of length m.
        y: Observation of length m.
        sigma: Noise standard deviation used to draw ``e``.
    """
    X: DenseMatrix
    beta_star: Vector
    e: Vector
    y: Vector
    sigma: float

    def __post_init__(self):
        self.X = as_matrix(self.X)
        m, n = self.X.shape
        self.beta_star = as_vector(self.beta_star, "beta_star", n)
        self.e = as_vector(self.e, "e", m)
        self.y = as_vector(self.y, "y", m)
        if self.sigma < 0:
            raise ConfigurationError(f"sigma must be nonnegative, got {self.sigma}")
        gap = np.linalg.norm(self.y - (self.X @ self.beta_star + self.e))
        if gap > 1e-10 * max(float(np.linalg.norm(self.y)), np.finfo(float).tiny):
            raise DataShapeError(f"y differs from X·beta_star + e by {gap:.3e}")

    @classmethod
    def from_parts(
        cls, X: npt.ArrayLike, beta_star: npt.ArrayLike, e: npt.ArrayLike, sigma: float
    ) -> Self:
        """Assemble an instance, computing y from its parts."""
        X = as_matrix(X)
        beta_star = as_vector(beta_star, "beta_star", X.shape[1])
        e = as_vector(e, "e", X.shape[0])
        return cls(X=X, beta_star=beta_star, e=e, y=X @ beta_star + e, sigma=sigma)

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def support(self) -> IndexSet:
        return IndexSet(tuple(np.flatnonzero(self.beta_star).tolist()), self.n)

    @property
    def s(self) -> int:
        return int(np.count_nonzero(self.beta_star))


def _check_q(q: float, allow_zero: bool = True) -> None:
    if q == 0 and allow_zero:
        return
    if not 0.0 < q <= 1.0:
        raise ConfigurationError(f"q must be 0 or lie in (0, 1], got {q}")


def lq_power(beta: npt.ArrayLike, q: float) -> float:
    """
    Return Σ|β_i|^q, or the number of nonzero entries when q = 0.

    Raises:
        DataShapeError: If beta has non-finite entries.
        ConfigurationError: If q is outside {0} ∪ (0, 1].
    """
    _check_q(q)
    beta = as_vector(beta, "beta")
    if q == 0:
        return float(np.count_nonzero(beta))
    return float(np.sum(np.abs(beta) ** q))


def lq_quasi_norm(beta: npt.ArrayLike, q: float) -> float:
    """
    ℓq quasi-norm (Σ|β_i|^q)^{1/q}; for q = 0 the count of nonzero entries.

    Args:
        beta: Finite real vector.
        q: 0 or a value in (0, 1].

    Returns:
        The quasi-norm value.
    """
    power = lq_power(beta, q)
    if q == 0:
        return power
    return power ** (1.0 / q)


def rank_by_magnitude(delta: Vector, candidates: npt.NDArray[np.intp]) -> npt.NDArray[np.intp]:
    """
    Order ``candidates`` (ascending indices) by decreasing |delta|.

    Ties keep the lower index first.
    """
    order = np.argsort(-np.abs(delta[candidates]), kind="stable")
    return candidates[order]


def _ranked_complement(delta: npt.ArrayLike, J: IndexSet, t: int) -> Tuple[Vector, npt.NDArray[np.intp]]:
    delta = as_vector(delta, "delta")
    if J.n != delta.shape[0]:
        raise DataShapeError(f"IndexSet is over n={J.n} but delta has length {delta.shape[0]}")
    if int(t) != t or t < 1:
        raise ConfigurationError(f"t must be a positive integer, got {t}")
    rest = J.complement().as_array()
    if t > rest.size:
        raise ConfigurationError(f"t={t} exceeds |J^c|={rest.size}")
    return delta, rank_by_magnitude(delta, rest)


def top_index_set(delta: npt.ArrayLike, J: IndexSet, t: int) -> IndexSet:
    """
    Indices of the t largest |δ_i| outside J, lowest index first on ties.

    Raises:
        ConfigurationError: If t exceeds the size of the complement of J.
    """
    delta, ranked = _ranked_complement(delta, J, t)
    return IndexSet.from_iterable(ranked[:t], delta.shape[0])


def batch_partition(delta: npt.ArrayLike, J: IndexSet, t: int) -> List[IndexSet]:
    """
    Split J^c into consecutive batches of t coordinates ranked by |δ|.

    The first batch is ``top_index_set(delta, J, t)``; the last one may be
    shorter than t.
    """
    delta, ranked = _ranked_complement(delta, J, t)
    n = delta.shape[0]
    return [IndexSet.from_iterable(ranked[k:k + t], n) for k in range(0, ranked.size, t)]


def cone_mask(deltas: npt.ArrayLike, cone: ConeParams, rtol: float = CONE_RTOL) -> npt.NDArray[np.bool_]:
    """
    Row-wise membership test in C_q(s, a) for a stack of vectors.

    Each row is tested with J equal to its s largest-magnitude coordinates,
    which maximizes the on-support mass and minimizes the off-support mass.
    """
    D = np.atleast_2d(np.asarray(deltas, dtype=float))
    cone.check_dimension(D.shape[1])
    powers = np.sort(np.abs(D) ** cone.q, axis=1)[:, ::-1]
    on = powers[:, :cone.s].sum(axis=1)
    off = powers[:, cone.s:].sum(axis=1)
    return off <= cone.a * on * (1.0 + rtol)


def cone_membership(delta: npt.ArrayLike, cone: ConeParams, rtol: float = CONE_RTOL) -> bool:
    """
    Whether ‖δ_{J^c}‖_q^q ≤ a‖δ_J‖_q^q for some |J| ≤ s.

    Args:
        delta: Real vector.
        cone: Cone parameters (q, s, a).
        rtol: Relative slack on the right-hand side for floating error.

    Returns:
        True when delta lies in C_q(s, a).
    """
    delta = as_vector(delta, "delta")
    return bool(cone_mask(delta, cone, rtol)[0])
