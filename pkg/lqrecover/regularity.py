"""
Regularity constants of a design matrix.

Sparse eigenvalues, restricted isometry and orthogonality constants, mutual
incoherence, the q-restricted eigenvalue modulus φ_q(s, t, a, X) and the
sufficient conditions that guarantee φ_q > 0.

Exact constants are computed by enumerating index subsets and refuse to run
past a combinatorial budget. φ_q itself is NP-hard in general, so
``rec_modulus_estimate`` reports a search upper bound together with the
analytic lower/upper sandwich, and certifies positivity only when the kernel
of X is at most one-dimensional.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy.linalg import null_space
from scipy.special import comb

from lqrecover.config import SearchConfig
from lqrecover.core import ConeParams, as_matrix, cone_mask
from lqrecover.exceptions import CombinatorialBudgetError, ConfigurationError, DataShapeError


logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 6
UNIT_DIAGONAL_TOL = 1e-8
_CHUNK = 4096


@dataclass(frozen=True)
class RecParams:
    """The quadruple (q, s, t, a) of the q-restricted eigenvalue condition.

    Requires 1 ≤ s ≤ t and s + t ≤ n; the last part is checked against a
    concrete design with ``check_dimension``.
    """
    q: float
    s: int
    t: int
    a: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise ConfigurationError(f"q must lie in (0, 1], got {self.q}")
        for name in ("s", "t"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if self.s > self.t:
            raise ConfigurationError(f"s={self.s} must not exceed t={self.t}")
        if not self.a > 0:
            raise ConfigurationError(f"a must be positive, got {self.a}")

    def check_dimension(self, n: int) -> None:
        if self.s + self.t > n:
            raise ConfigurationError(f"s + t = {self.s + self.t} exceeds n = {n}")

    @property
    def cone(self) -> ConeParams:
        return ConeParams(self.q, self.s, self.a)

    @property
    def batch_coefficient(self) -> float:
        """a^{1/q}(s/t)^{1/q − 1/2}, the weight of the off-support batches."""
        return self.a ** (1.0 / self.q) * (self.s / self.t) ** (1.0 / self.q - 0.5)

    def to_dict(self) -> Dict[str, Any]:
        return {"q": self.q, "s": self.s, "t": self.t, "a": self.a}


class CertificationStatus(str, Enum):
    POSITIVE = "POSITIVE"
    ZERO = "ZERO"
    UNKNOWN = "UNKNOWN"


class ConditionStatus(str, Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    NOT_APPLICABLE = "NOT-APPLICABLE"
    UNAVAILABLE = "UNAVAILABLE"


def _count_subsets(n: int, k: int) -> int:
    return int(comb(n, k, exact=True))


def _check_budget(required: int, budget: int, what: str) -> None:
    if required > budget:
        raise CombinatorialBudgetError(
            f"{what} needs {required} subsets, above the budget of {budget}",
            required=required,
            budget=budget,
        )


def _subset_chunks(n: int, k: int, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """All k-subsets of range(n) in lexicographic order, as (≤chunk)×k index arrays."""
    combos = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _as_gram(Delta: npt.ArrayLike) -> np.ndarray:
    G = as_matrix(Delta, "Delta")
    if G.shape[0] != G.shape[1]:
        raise DataShapeError(f"Delta must be square, got shape {G.shape}")
    if not np.allclose(G, G.T, rtol=0.0, atol=1e-10 * max(1.0, float(np.max(np.abs(G))))):
        raise DataShapeError("Delta must be symmetric")
    return 0.5 * (G + G.T)


def _check_order(s: int, n: int, name: str = "s") -> None:
    if isinstance(s, bool) or int(s) != s or not 1 <= s <= n:
        raise ConfigurationError(f"{name} must be an integer in [1, {n}], got {s!r}")


def sparse_eigenvalues(Delta: npt.ArrayLike, s: int, budget: int = DEFAULT_BUDGET) -> Tuple[float, float]:
    """
    Smallest and largest eigenvalues over all s×s principal submatrices.

    By eigenvalue interlacing the extremes over supports of size at most s
    are attained at size exactly s, so only C(n, s) submatrices are visited.

    Args:
        Delta: Symmetric n×n matrix.
        s: Sparsity level, 1 ≤ s ≤ n.
        budget: Largest number of submatrices to enumerate.

    Returns:
        (σ_min(s, Δ), σ_max(s, Δ))

    Raises:
        CombinatorialBudgetError: If C(n, s) exceeds the budget.
    """
    G = _as_gram(Delta)
    n = G.shape[0]
    _check_order(s, n)
    required = _count_subsets(n, s)
    _check_budget(required, budget, f"sparse eigenvalues of order {s} (n={n})")
    logger.debug("sparse eigenvalues: %d principal submatrices of size %d", required, s)

    lo, hi = math.inf, -math.inf
    for idx in _subset_chunks(n, s):
        blocks = G[idx[:, :, None], idx[:, None, :]]
        vals = np.linalg.eigvalsh(blocks)
        lo = min(lo, float(vals[:, 0].min()))
        hi = max(hi, float(vals[:, -1].max()))
    return lo, hi


@dataclass
class SampledEigenvalues:
    """Monte-Carlo bounds on the sparse eigenvalues.

    ``sigma_min_upper`` is an upper bound on σ_min(s) and ``sigma_max_lower``
    a lower bound on σ_max(s); neither is the exact value.
    """
    sigma_min_upper: float
    sigma_max_lower: float
    num_samples: int
    label: str = "monte-carlo bounds (not exact)"


def sampled_sparse_eigenvalues(
    Delta: npt.ArrayLike, s: int, num_samples: int = 10000, seed: int = 0
) -> SampledEigenvalues:
    """Sparse-eigenvalue bounds from randomly drawn supports of size s."""
    G = _as_gram(Delta)
    n = G.shape[0]
    _check_order(s, n)
    if num_samples < 1:
        raise ConfigurationError(f"num_samples must be positive, got {num_samples}")
    rng = np.random.default_rng(seed)
    idx = np.sort(np.argsort(rng.random((num_samples, n)), axis=1)[:, :s], axis=1)
    vals = np.linalg.eigvalsh(G[idx[:, :, None], idx[:, None, :]])
    return SampledEigenvalues(float(vals[:, 0].min()), float(vals[:, -1].max()), num_samples)


def restricted_isometry_constant(X: npt.ArrayLike, s: int, budget: int = DEFAULT_BUDGET) -> float:
    """η_s(X) = max{1 − σ_min(s, XᵀX), σ_max(s, XᵀX) − 1}."""
    X = as_matrix(X)
    lo, hi = sparse_eigenvalues(X.T @ X, s, budget)
    return max(1.0 - lo, hi - 1.0, 0.0)


def restricted_orthogonality_constant(
    X: npt.ArrayLike, s: int, t: int, budget: int = DEFAULT_BUDGET
) -> float:
    """
    θ_{s,t}(X): the largest spectral norm of a J×T block of XᵀX over disjoint
    |J| ≤ s, |T| ≤ t.

    Block norms only grow when rows or columns are added, so only |J| = s,
    |T| = t is enumerated.

    Raises:
        ConfigurationError: If s + t > n.
        CombinatorialBudgetError: If C(n, s)·C(n − s, t) exceeds the budget.
    """
    X = as_matrix(X)
    n = X.shape[1]
    _check_order(s, n)
    _check_order(t, n, "t")
    if s + t > n:
        raise ConfigurationError(f"s + t = {s + t} exceeds n = {n}")
    required = _count_subsets(n, s) * _count_subsets(n - s, t)
    _check_budget(required, budget, f"restricted orthogonality constant ({s}, {t}) (n={n})")
    G = X.T @ X

    best = 0.0
    for J in itertools.combinations(range(n), s):
        rest = np.setdiff1d(np.arange(n), J)
        rows = G[list(J)]
        for local in _subset_chunks(rest.size, t):
            T = rest[local]
            blocks = rows[:, T].transpose(1, 0, 2)
            norms = np.linalg.norm(blocks, ord=2, axis=(1, 2))
            best = max(best, float(norms.max()))
    return best


def mutual_incoherence(X: npt.ArrayLike) -> Tuple[float, np.ndarray]:
    """
    θ_{1,1} of the column-normalized design.

    Returns:
        (largest |off-diagonal| entry of the normalized Gram matrix, column norms)

    Raises:
        DataShapeError: If a column is zero.
    """
    X = as_matrix(X)
    scales = np.linalg.norm(X, axis=0)
    if np.any(scales == 0):
        raise DataShapeError(f"Columns {np.flatnonzero(scales == 0).tolist()} are zero")
    if X.shape[1] == 1:
        return 0.0, scales
    Xn = X / scales
    G = Xn.T @ Xn
    np.fill_diagonal(G, 0.0)
    return float(np.max(np.abs(G))), scales


@dataclass
class RipConstants:
    """Restricted isometry constants η_s, orthogonality constants θ_{s,t} and mic."""
    eta: Dict[int, float]
    theta: Dict[Tuple[int, int], float]
    mic: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eta": {str(k): v for k, v in self.eta.items()},
            "theta": {f"{s},{t}": v for (s, t), v in self.theta.items()},
            "mic": self.mic,
        }


def rip_constants(X: npt.ArrayLike, max_order: int, budget: int = DEFAULT_BUDGET) -> RipConstants:
    """η_s for s ≤ max_order and θ_{s,t} for s + t ≤ max_order."""
    X = as_matrix(X)
    n = X.shape[1]
    _check_order(max_order, n, "max_order")
    eta = {s: restricted_isometry_constant(X, s, budget) for s in range(1, max_order + 1)}
    theta = {
        (s, t): restricted_orthogonality_constant(X, s, t, budget)
        for s in range(1, max_order)
        for t in range(1, max_order - s + 1)
    }
    mic, _ = mutual_incoherence(X)
    return RipConstants(eta=eta, theta=theta, mic=mic)


@dataclass
class RecEstimate:
    """Outcome of the φ_q(s, t, a, X) search.

    Attributes:
        modulus_upper: Smallest ratio ‖Xδ‖₂/‖δ_{J∪J(δ;t)}‖₂ found over the cone.
        analytic_lower: Sparse-eigenvalue lower bound, None when over budget.
        analytic_upper: Sparse-eigenvalue upper bound, None when over budget.
        certified: POSITIVE, ZERO or UNKNOWN.
        witness: Unit vector achieving modulus_upper.
        kernel_dim: Dimension of ker(X).
        num_starts: Starting directions searched.
        note: Free-text remark on how the status was reached.
    """
    modulus_upper: float
    analytic_lower: Optional[float]
    analytic_upper: Optional[float]
    certified: CertificationStatus
    witness: Optional[np.ndarray]
    kernel_dim: int = 0
    num_starts: int = 0
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "modulus_upper": self.modulus_upper,
            "analytic_lower": self.analytic_lower,
            "analytic_upper": self.analytic_upper,
            "certified": self.certified.value,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "kernel_dim": self.kernel_dim,
            "num_starts": self.num_starts,
            "note": self.note,
        }


def analytic_modulus_bounds(
    X: npt.ArrayLike, rec: RecParams, budget: int = DEFAULT_BUDGET
) -> Tuple[float, float]:
    """
    Lower and upper bounds on φ_q from sparse eigenvalues:

        √σ_min(s+t) − c·√σ_max(t) ≤ φ_q ≤ √σ_max(s+t) + c·√σ_max(t),

    with c = a^{1/q}(s/t)^{1/q − 1/2}. The lower bound may be negative.
    """
    X = as_matrix(X)
    rec.check_dimension(X.shape[1])
    G = X.T @ X
    lo_st, hi_st = sparse_eigenvalues(G, rec.s + rec.t, budget)
    _, hi_t = sparse_eigenvalues(G, rec.t, budget)
    spill = rec.batch_coefficient * math.sqrt(max(hi_t, 0.0))
    return math.sqrt(max(lo_st, 0.0)) - spill, math.sqrt(max(hi_st, 0.0)) + spill


def _project_to_cone(D: np.ndarray, cone: ConeParams) -> np.ndarray:
    """Shrink the off-top-s part of each row until it satisfies the cone inequality, then normalize."""
    D = D.copy()
    order = np.argsort(-np.abs(D), axis=1, kind="stable")
    top = np.zeros_like(D, dtype=bool)
    np.put_along_axis(top, order[:, :cone.s], True, axis=1)
    powers = np.abs(D) ** cone.q
    on = np.sum(np.where(top, powers, 0.0), axis=1)
    off = np.sum(np.where(top, 0.0, powers), axis=1)
    over = off > cone.a * on
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(over, (cone.a * on / np.where(off > 0, off, 1.0)) ** (1.0 / cone.q), 1.0)
    D = np.where(top, D, D * c[:, None])
    norms = np.linalg.norm(D, axis=1)
    norms[norms == 0] = 1.0
    return D / norms[:, None]


def _top_mask(D: np.ndarray, k: int) -> np.ndarray:
    order = np.argsort(-np.abs(D), axis=1, kind="stable")
    mask = np.zeros_like(D, dtype=bool)
    np.put_along_axis(mask, order[:, :k], True, axis=1)
    return mask


def _squared_ratios(D: np.ndarray, X: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """‖Xδ‖²/‖δ_T‖² per row with T the top-k coordinates; also returns the mask and denominators."""
    mask = _top_mask(D, k)
    num = np.sum((D @ X.T) ** 2, axis=1)
    den = np.sum(np.where(mask, D * D, 0.0), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = num / den
    return f, mask, den


def rec_modulus_estimate(
    X: npt.ArrayLike, rec: RecParams, search: Optional[SearchConfig] = None
) -> RecEstimate:
    """
    Estimate φ_q(s, t, a, X) = min over δ ∈ C_q(s, a) of ‖Xδ‖₂/‖δ_{J∪J(δ;t)}‖₂.

    For any δ the best J is its top-s coordinates, so the denominator is the
    norm of the top s+t coordinates. The search runs batched projected
    gradient descent on the unit sphere from random directions, kernel basis
    vectors and coordinate vectors; every iterate stays inside the cone, so
    the result is a genuine upper bound on φ_q.

    Args:
        X: Design matrix.
        rec: Parameters (q, s, t, a) with s + t ≤ n.
        search: Multi-start controls; defaults to ``SearchConfig()``.

    Returns:
        RecEstimate. ZERO means a cone member with (numerically) zero ratio
        was found; POSITIVE is only issued when dim ker(X) ≤ 1.
    """
    X = as_matrix(X)
    n = X.shape[1]
    rec.check_dimension(n)
    search = search or SearchConfig()
    cone = rec.cone
    k = rec.s + rec.t
    G = X.T @ X
    norm_x = float(np.linalg.norm(X, 2))
    lam_max = norm_x ** 2

    try:
        analytic_lower, analytic_upper = analytic_modulus_bounds(X, rec, search.budget)
    except CombinatorialBudgetError as e:
        logger.warning("Analytic bounds on the modulus unavailable: %s", e)
        analytic_lower = analytic_upper = None

    kernel = null_space(X).T
    kernel_dim = kernel.shape[0]
    kernel_in_cone = cone_mask(kernel, cone) if kernel_dim else np.zeros(0, dtype=bool)

    if lam_max == 0:
        witness = np.eye(n)[0]
        return RecEstimate(0.0, analytic_lower, analytic_upper, CertificationStatus.ZERO, witness,
                           kernel_dim, 0, "X is the zero matrix")

    if np.any(kernel_in_cone):
        witness = kernel[int(np.argmax(kernel_in_cone))]
        witness = witness / np.linalg.norm(witness)
        return RecEstimate(0.0, analytic_lower, analytic_upper, CertificationStatus.ZERO, witness,
                           kernel_dim, kernel_dim, "kernel direction inside the cone")

    rng = np.random.default_rng(search.seed)
    starts = np.vstack([rng.standard_normal((search.num_starts, n)), kernel, np.eye(n)])
    D = _project_to_cone(starts, cone)
    f, mask, den = _squared_ratios(D, X, k)
    eta = np.full(D.shape[0], 1.0 / lam_max)
    floor = search.min_step / lam_max
    active = np.isfinite(f)

    for _ in range(search.max_iters):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        Dr = D[rows]
        grad = 2.0 * (Dr @ G - f[rows, None] * np.where(mask[rows], Dr, 0.0)) / den[rows, None]
        grad -= np.sum(grad * Dr, axis=1)[:, None] * Dr
        cand = Dr - eta[rows, None] * grad
        cand_norms = np.linalg.norm(cand, axis=1)
        cand_norms[cand_norms == 0] = 1.0
        cand = cand / cand_norms[:, None]
        outside = ~cone_mask(cand, cone, rtol=0.0)
        if np.any(outside):
            cand[outside] = _project_to_cone(cand[outside], cone)
        f_c, mask_c, den_c = _squared_ratios(cand, X, k)
        accept = np.isfinite(f_c) & (f_c < f[rows]) & cone_mask(cand, cone)
        acc = rows[accept]
        D[acc], f[acc], mask[acc], den[acc] = cand[accept], f_c[accept], mask_c[accept], den_c[accept]
        eta[acc] *= 2.0
        rej = rows[~accept]
        eta[rej] *= 0.5
        active[rej[eta[rej] < floor]] = False

    finite = np.isfinite(f)
    if not np.any(finite):
        upper = analytic_upper if analytic_upper is not None else math.inf
        return RecEstimate(upper, analytic_lower, analytic_upper, CertificationStatus.UNKNOWN, None,
                           kernel_dim, D.shape[0], "no feasible search direction; reporting the analytic upper bound")

    best = int(np.argmin(np.where(finite, f, np.inf)))
    ratio = math.sqrt(max(float(f[best]), 0.0))
    witness = D[best].copy()

    if ratio <= search.zero_tol * norm_x:
        status, note = CertificationStatus.ZERO, "search reached a numerically zero ratio"
    elif kernel_dim <= 1:
        status, note = CertificationStatus.POSITIVE, f"kernel dimension {kernel_dim} has no direction in the cone"
    elif analytic_lower is not None and analytic_lower > 0:
        status, note = CertificationStatus.POSITIVE, f"sparse-eigenvalue lower bound {analytic_lower:.6g}"
    else:
        status, note = CertificationStatus.UNKNOWN, f"kernel dimension {kernel_dim}; positivity not certified"
    logger.debug("rec modulus (q=%g, s=%d, t=%d, a=%g): %.6e, %s", rec.q, rec.s, rec.t, rec.a, ratio, status.value)

    return RecEstimate(ratio, analytic_lower, analytic_upper, status, witness, kernel_dim, D.shape[0], note)


@dataclass
class ConditionResult:
    """One sufficient condition with its computed sides; ``holds`` means lhs op rhs."""
    name: str
    status: ConditionStatus
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    relation: str = ">"
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "note": self.note,
        }


@dataclass
class SufficientConditions:
    """Conditions (a)-(c), their relaxed forms (a°)-(c°) and the φ_q lower bounds they imply."""
    conditions: List[ConditionResult]
    implied_phi_lower: Dict[str, float] = field(default_factory=dict)
    unit_diagonal: bool = False
    normalized_mic: Optional[float] = None
    column_scales: Optional[List[float]] = None

    def __getitem__(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def any_true(self) -> bool:
        return any(c.status is ConditionStatus.TRUE for c in self.conditions)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "conditions": [c.to_dict() for c in self.conditions],
            "implied_phi_lower": dict(self.implied_phi_lower),
            "unit_diagonal": self.unit_diagonal,
            "normalized_mic": self.normalized_mic,
            "column_scales": self.column_scales,
        }


def _judge(name: str, lhs: float, rhs: float, relation: str) -> ConditionResult:
    holds = lhs > rhs if relation == ">" else lhs < rhs
    return ConditionResult(name, ConditionStatus.TRUE if holds else ConditionStatus.FALSE, lhs, rhs, relation)


def check_sufficient_conditions(
    X: npt.ArrayLike, rec: RecParams, budget: int = DEFAULT_BUDGET
) -> SufficientConditions:
    """
    Evaluate the spectral, RIP and coherence conditions that imply φ_q(s, t, a, X) > 0.

    Each condition is reported with its left and right sides. Conditions whose
    constants exceed the enumeration budget are UNAVAILABLE; the coherence
    conditions are NOT-APPLICABLE unless XᵀX has unit diagonal, in which case
    the coherence of the normalized design is reported instead.
    """
    X = as_matrix(X)
    n = X.shape[1]
    rec.check_dimension(n)
    q, s, t, a = rec.q, rec.s, rec.t, rec.a
    G = X.T @ X
    ratio = a * s / t
    soft = min(1.0, ratio ** (1.0 / q - 1.0))
    results: List[ConditionResult] = []
    implied: Dict[str, float] = {}

    # spectral conditions
    try:
        lo_st, _ = sparse_eigenvalues(G, s + t, budget)
        _, hi_t = sparse_eigenvalues(G, t, budget)
        results.append(_judge("a", lo_st, a * ratio ** (2.0 / q - 1.0) * hi_t, ">"))
        results.append(_judge("a_circ", lo_st, min(1.0, ratio ** (2.0 / q - 2.0)) * (s / t) * a * a * hi_t, ">"))
        if results[-2].status is ConditionStatus.TRUE:
            implied["a"] = math.sqrt(max(lo_st, 0.0)) - rec.batch_coefficient * math.sqrt(max(hi_t, 0.0))
    except CombinatorialBudgetError as e:
        logger.warning("Spectral conditions unavailable: %s", e)
        for name in ("a", "a_circ"):
            results.append(ConditionResult(name, ConditionStatus.UNAVAILABLE, note=str(e)))

    # RIP conditions; θ_{t,s+t} is capped to the columns left after t are used
    try:
        eta_t = restricted_isometry_constant(X, t, budget)
        eta_st = restricted_isometry_constant(X, s + t, budget)
        theta_st = restricted_orthogonality_constant(X, s, t, budget)
        theta_wide = restricted_orthogonality_constant(X, t, min(s + t, n - t), budget)
        base = eta_t + theta_st
        results.append(_judge("b", base + math.sqrt(a) * ratio ** (1.0 / q - 0.5) * theta_wide, 1.0, "<"))
        results.append(_judge("b_circ", base + soft * math.sqrt(s / t) * a * theta_wide, 1.0, "<"))
        if results[-2].status is ConditionStatus.TRUE and eta_st < 1.0:
            implied["b"] = math.sqrt(1.0 - eta_st) * (1.0 - rec.batch_coefficient * theta_wide / (1.0 - eta_st))
    except CombinatorialBudgetError as e:
        logger.warning("RIP conditions unavailable: %s", e)
        for name in ("b", "b_circ"):
            results.append(ConditionResult(name, ConditionStatus.UNAVAILABLE, note=str(e)))

    # coherence conditions
    diag = np.diag(G)
    unit_diagonal = bool(np.all(np.abs(diag - 1.0) <= UNIT_DIAGONAL_TOL))
    normalized_mic: Optional[float] = None
    scales: Optional[List[float]] = None
    try:
        mic, col_norms = mutual_incoherence(X)
        normalized_mic, scales = mic, [float(v) for v in col_norms]
    except DataShapeError as e:
        mic = None
        logger.warning("Mutual incoherence unavailable: %s", e)
    rhs_c = 1.0 / ((1.0 + 2.0 * a * ratio ** (1.0 / q - 1.0)) * (s + t))
    rhs_c_circ = 1.0 / ((1.0 + 2.0 * a * soft) * (s + t))
    if unit_diagonal and mic is not None:
        results.append(_judge("c", mic, rhs_c, "<"))
        results.append(_judge("c_circ", mic, rhs_c_circ, "<"))
        if results[-2].status is ConditionStatus.TRUE:
            implied["c"] = 1.0 - (1.0 + 2.0 * a * ratio ** (1.0 / q - 1.0)) * (s + t) * mic
    else:
        note = "XᵀX lacks a unit diagonal; normalized_mic reports the coherence after column scaling"
        results.append(ConditionResult("c", ConditionStatus.NOT_APPLICABLE, mic, rhs_c, "<", note))
        results.append(ConditionResult("c_circ", ConditionStatus.NOT_APPLICABLE, mic, rhs_c_circ, "<", note))

    return SufficientConditions(results, implied, unit_diagonal, normalized_mic, scales)


@dataclass
class CertificationReport:
    """Constants, modulus estimate and sufficient conditions for one design."""
    rec: RecParams
    shape: Tuple[int, int]
    estimate: RecEstimate
    conditions: SufficientConditions
    constants: Dict[str, Optional[float]]
    budget: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rec": self.rec.to_dict(),
            "rows": self.shape[0],
            "cols": self.shape[1],
            "constants": dict(self.constants),
            "estimate": self.estimate.to_dict(),
            "sufficient_conditions": self.conditions.to_dict(),
            "budget": self.budget,
        }


def certify(X: npt.ArrayLike, rec: RecParams, search: Optional[SearchConfig] = None) -> CertificationReport:
    """Run the constants, the modulus search and the sufficient-condition checks together."""
    X = as_matrix(X)
    search = search or SearchConfig()
    rec.check_dimension(X.shape[1])
    G = X.T @ X
    constants: Dict[str, Optional[float]] = {}
    for label, order in (("s+t", rec.s + rec.t), ("t", rec.t), ("s", rec.s)):
        try:
            lo, hi = sparse_eigenvalues(G, order, search.budget)
        except CombinatorialBudgetError:
            lo = hi = None
        constants[f"sigma_min({label})"] = lo
        constants[f"sigma_max({label})"] = hi
        constants[f"eta({label})"] = None if lo is None else max(1.0 - lo, hi - 1.0, 0.0)
    try:
        constants["theta(s,t)"] = restricted_orthogonality_constant(X, rec.s, rec.t, search.budget)
    except CombinatorialBudgetError:
        constants["theta(s,t)"] = None

    estimate = rec_modulus_estimate(X, rec, search)
    conditions = check_sufficient_conditions(X, rec, search.budget)
    constants["mic_normalized"] = conditions.normalized_mic
    return CertificationReport(rec, X.shape, estimate, conditions, constants, search.budget)
