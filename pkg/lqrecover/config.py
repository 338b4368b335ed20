"""
Configuration records for solvers, the regularity search and experiments.

All records validate themselves on construction and can be built from plain
dictionaries, so YAML/JSON configuration files and run manifests map onto
them directly.
"""

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import yaml
from typing_extensions import Self

from lqrecover.exceptions import ConfigurationError
from lqrecover.penalties import PenaltyKind, PenaltySpec


PRESET_SAMPLE_SIZES = [177, 355, 532, 710, 887, 976]
PRESET_METHODS = ["l0", "l1/2", "l2/3", "l1", "scad", "mcp"]
# c in m = ⌈c·s·ln n⌉ spanning the same range as PRESET_SAMPLE_SIZES
LADDER_FACTORS = [0.25, 0.5, 0.75, 1.0, 1.25, 1.38]


def config_digest(data: Dict[str, Any]) -> str:
    """SHA-256 of the canonical (sorted, compact) JSON form of ``data``."""
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _reject_unknown(cls, data: Dict[str, Any]) -> None:
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(f"Unknown {cls.__name__} fields: {sorted(unknown)}")


def _positive_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _positive_float(name: str, value: Any) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"{name} must be a number, got {value!r}") from e
    if not (value > 0 and math.isfinite(value)):
        raise ConfigurationError(f"{name} must be positive, got {value}")
    return value


@dataclass
class SolverOptions:
    """Iteration controls shared by the estimators.

    Attributes:
        max_iters: Iteration cap (outer iterations for the reweighted solver).
        tol: Relative objective change for convergence, measured against
            max(1, |objective|).
        step: Fixed step size, or None for 1/L with L = σ_max(XᵀX)/m.
        accelerate: Momentum with restart; only used for convex penalties.
        seed: Seed for randomized starts.
        inner_max_iters: Iteration cap of the primal-dual inner solver.
        inner_tol: Relative duality gap of the inner solver.
        num_starts: Random starts per support in the exhaustive solver.
    """
    max_iters: int = 1000
    tol: float = 1e-6
    step: Optional[float] = None
    accelerate: bool = True
    seed: int = 0
    inner_max_iters: int = 5000
    inner_tol: float = 1e-7
    num_starts: int = 4

    def __post_init__(self):
        self.max_iters = _positive_int("max_iters", self.max_iters)
        self.tol = _positive_float("tol", self.tol)
        if isinstance(self.step, str):
            if self.step.lower() != "auto":
                raise ConfigurationError(f"step must be a positive number or 'auto', got {self.step!r}")
            self.step = None
        if self.step is not None:
            self.step = _positive_float("step", self.step)
        self.inner_max_iters = _positive_int("inner_max_iters", self.inner_max_iters)
        self.inner_tol = _positive_float("inner_tol", self.inner_tol)
        if isinstance(self.num_starts, bool) or int(self.num_starts) != self.num_starts or self.num_starts < 0:
            raise ConfigurationError(f"num_starts must be a nonnegative integer, got {self.num_starts!r}")
        self.seed = int(self.seed)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        if not isinstance(data, dict):
            raise ConfigurationError("Solver options must be a dictionary")
        _reject_unknown(cls, data)
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        out = dataclasses.asdict(self)
        out["step"] = "auto" if self.step is None else self.step
        return out


@dataclass
class SearchConfig:
    """Multi-start search for the restricted eigenvalue modulus.

    Attributes:
        num_starts: Random starting directions.
        max_iters: Projected-gradient iterations per start.
        seed: Seed of the starting directions.
        zero_tol: Ratios at or below zero_tol·‖X‖₂ count as zero.
        budget: Largest number of subsets any enumeration may visit.
        min_step: Starts stop once their step falls below min_step/σ_max(XᵀX).
    """
    num_starts: int = 200
    max_iters: int = 500
    seed: int = 0
    zero_tol: float = 1e-9
    budget: int = 10 ** 6
    min_step: float = 1e-12

    def __post_init__(self):
        self.num_starts = _positive_int("num_starts", self.num_starts)
        self.max_iters = _positive_int("max_iters", self.max_iters)
        self.zero_tol = _positive_float("zero_tol", self.zero_tol)
        self.budget = _positive_int("budget", self.budget)
        self.min_step = _positive_float("min_step", self.min_step)
        self.seed = int(self.seed)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        if not isinstance(data, dict):
            raise ConfigurationError("Search configuration must be a dictionary")
        _reject_unknown(cls, data)
        return cls(**data)


class CovarianceKind(str, Enum):
    IDENTITY = "identity"
    TOEPLITZ = "toeplitz"
    EXPLICIT = "explicit"


@dataclass
class CovarianceSpec:
    """Row covariance Σ of a Gaussian random design.

    Attributes:
        kind: IDENTITY, TOEPLITZ (Σ_ij = rho^|i−j|) or EXPLICIT.
        rho: Toeplitz decay, in (−1, 1).
        matrix: Explicit n×n matrix (nested lists) when kind is EXPLICIT.
    """
    kind: CovarianceKind = CovarianceKind.IDENTITY
    rho: float = 0.0
    matrix: Optional[List[List[float]]] = None

    def __post_init__(self):
        try:
            self.kind = CovarianceKind(self.kind)
        except ValueError as e:
            raise ConfigurationError(f"Unknown covariance kind: {self.kind!r}") from e
        if self.kind is CovarianceKind.TOEPLITZ and not -1.0 < self.rho < 1.0:
            raise ConfigurationError(f"Toeplitz rho must lie in (-1, 1), got {self.rho}")
        if self.kind is CovarianceKind.EXPLICIT:
            if self.matrix is None:
                raise ConfigurationError("EXPLICIT covariance needs a matrix")
            sigma = np.asarray(self.matrix, dtype=float)
            if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
                raise ConfigurationError(f"Covariance matrix must be square, got shape {sigma.shape}")
            if not np.allclose(sigma, sigma.T, atol=1e-10):
                raise ConfigurationError("Covariance matrix must be symmetric")

    def matrix_for(self, n: int) -> np.ndarray:
        """Σ as an n×n array."""
        match self.kind:
            case CovarianceKind.IDENTITY:
                return np.eye(n)
            case CovarianceKind.TOEPLITZ:
                idx = np.arange(n)
                return self.rho ** np.abs(idx[:, None] - idx[None, :])
            case CovarianceKind.EXPLICIT:
                sigma = np.asarray(self.matrix, dtype=float)
                if sigma.shape != (n, n):
                    raise ConfigurationError(f"Covariance matrix is {sigma.shape}, expected ({n}, {n})")
                return sigma

    def sqrt_for(self, n: int) -> np.ndarray:
        """Symmetric square root Σ^{1/2} via eigendecomposition.

        Raises:
            ConfigurationError: If Σ has a clearly negative eigenvalue.
        """
        sigma = self.matrix_for(n)
        vals, vecs = np.linalg.eigh(sigma)
        floor = -1e-10 * max(1.0, float(np.max(np.abs(vals))))
        if vals.min() < floor:
            raise ConfigurationError(f"Covariance is not positive semidefinite (min eigenvalue {vals.min():.3e})")
        return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T

    def unit_diagonal(self, n: int) -> bool:
        return bool(np.allclose(np.diag(self.matrix_for(n)), 1.0, atol=1e-8))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        if not isinstance(data, dict):
            raise ConfigurationError("Covariance data must be a dictionary")
        _reject_unknown(cls, data)
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "rho": self.rho, "matrix": self.matrix}


class ProblemKind(str, Enum):
    REGULARIZED = "regularized"
    CONSTRAINED = "constrained"


class Tuning(str, Enum):
    CV = "cv"
    THEORY = "theory"


@dataclass
class MethodSpec:
    """One estimator of a sweep.

    Attributes:
        name: Label used in tables.
        problem: Regularized (λ-penalized) or constrained (ε-ball) problem.
        penalty: Penalty family; constrained problems use LQ or L1.
        q: Exponent for LQ penalties and constrained problems.
        tuning: How λ is chosen for regularized problems.
        scad_a: SCAD parameter.
        mcp_gamma: MCP parameter.
    """
    name: str
    problem: ProblemKind = ProblemKind.REGULARIZED
    penalty: PenaltyKind = PenaltyKind.L1
    q: Optional[float] = None
    tuning: Tuning = Tuning.CV
    scad_a: float = 3.7
    mcp_gamma: float = 3.0

    def __post_init__(self):
        try:
            self.problem = ProblemKind(self.problem)
            self.penalty = PenaltyKind(self.penalty)
            self.tuning = Tuning(self.tuning)
        except ValueError as e:
            raise ConfigurationError(f"Invalid method '{self.name}': {e}") from e
        if self.penalty is PenaltyKind.L1:
            self.q = 1.0
        elif self.penalty is PenaltyKind.L0:
            self.q = 0.0
        if self.problem is ProblemKind.CONSTRAINED:
            if self.penalty not in (PenaltyKind.LQ, PenaltyKind.L1):
                raise ConfigurationError(f"Constrained method '{self.name}' needs an lq or l1 penalty")
        if self.penalty is PenaltyKind.LQ and (self.q is None or not 0.0 < self.q < 1.0):
            raise ConfigurationError(f"Method '{self.name}' needs q in (0, 1), got {self.q}")
        if self.tuning is Tuning.THEORY and self.penalty not in (PenaltyKind.LQ, PenaltyKind.L1):
            raise ConfigurationError(f"Theory tuning is defined for lq and l1 only, not '{self.name}'")
        # validates the penalty parameters
        self.penalty_spec(1.0)

    def penalty_spec(self, lam: float) -> PenaltySpec:
        return PenaltySpec(self.penalty, lam, q=self.q if self.penalty is PenaltyKind.LQ else None,
                           scad_a=self.scad_a, mcp_gamma=self.mcp_gamma)

    @property
    def cone_exponent(self) -> Optional[float]:
        """q of the cone used for the dominant-property check (None for ℓ0, SCAD and MCP)."""
        if self.penalty not in (PenaltyKind.LQ, PenaltyKind.L1):
            return None
        if self.penalty is PenaltyKind.LQ:
            return self.q
        return 1.0

    @classmethod
    def from_name(cls, name: str) -> Self:
        key = name.strip().lower()
        if key not in METHOD_PRESETS:
            raise ConfigurationError(f"Unknown method '{name}'; choose from {sorted(METHOD_PRESETS)}")
        return cls(name=key, **METHOD_PRESETS[key])

    @classmethod
    def from_dict(cls, data: Union[str, Dict[str, Any]]) -> Self:
        if isinstance(data, str):
            return cls.from_name(data)
        if not isinstance(data, dict):
            raise ConfigurationError("Method data must be a name or a dictionary")
        _reject_unknown(cls, data)
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "problem": self.problem.value,
            "penalty": self.penalty.value,
            "q": self.q,
            "tuning": self.tuning.value,
            "scad_a": self.scad_a,
            "mcp_gamma": self.mcp_gamma,
        }


METHOD_PRESETS: Dict[str, Dict[str, Any]] = {
    "l0": {"penalty": PenaltyKind.L0},
    "l1/2": {"penalty": PenaltyKind.LQ, "q": 0.5},
    "l2/3": {"penalty": PenaltyKind.LQ, "q": 2.0 / 3.0},
    "l1": {"penalty": PenaltyKind.L1},
    "scad": {"penalty": PenaltyKind.SCAD},
    "mcp": {"penalty": PenaltyKind.MCP},
    "cp-l1/2": {"problem": ProblemKind.CONSTRAINED, "penalty": PenaltyKind.LQ, "q": 0.5},
    "cp-l2/3": {"problem": ProblemKind.CONSTRAINED, "penalty": PenaltyKind.LQ, "q": 2.0 / 3.0},
    "cp-l1": {"problem": ProblemKind.CONSTRAINED, "penalty": PenaltyKind.L1},
}


def sample_size_ladder(s: int, n: int, factors: List[float]) -> List[int]:
    """Sample sizes m = ⌈c·s·ln n⌉ for each factor c."""
    if n < 2:
        raise ConfigurationError(f"n must be at least 2 for a log-scaled ladder, got {n}")
    return [int(math.ceil(c * s * math.log(n))) for c in factors]


@dataclass
class ExperimentConfig:
    """Monte-Carlo sweep configuration.

    Attributes:
        n: Number of features.
        s: Sparsity of the true coefficient vector.
        sample_sizes: Values of m.
        sigma: Noise standard deviation.
        num_trials: Trials per (m, method) cell.
        methods: Estimators to compare.
        cv_folds: Folds of the λ cross-validation.
        lambda_grid: Explicit λ grid; None builds a data-driven log grid.
        num_lambdas: Size of the data-driven grid.
        lambda_ratio: Smallest/largest λ of the data-driven grid.
        support_tol: |β̂_i| above this counts as selected.
        master_seed: Root of all per-trial seeds.
        covariance: Row covariance of the design.
        beta_min_magnitude: Nonzero entries of β* are redrawn below this size.
        a: Cone constant for regularized bounds and dominant-property checks.
        theta: Column-norm slack θ of the tuning rule.
        b: Probability exponent b of the tuning rule.
        t: Batch size of the REC used in bound overlays (None means s).
        solver: Iteration controls for every solve.
    """
    n: int = 1024
    s: int = 102
    sample_sizes: List[int] = field(default_factory=lambda: list(PRESET_SAMPLE_SIZES))
    sigma: float = 0.01
    num_trials: int = 100
    methods: List[MethodSpec] = field(default_factory=lambda: [MethodSpec.from_name(m) for m in PRESET_METHODS])
    cv_folds: int = 10
    lambda_grid: Optional[List[float]] = None
    num_lambdas: int = 20
    lambda_ratio: float = 1e-3
    support_tol: float = 1e-4
    master_seed: int = 0
    covariance: CovarianceSpec = field(default_factory=CovarianceSpec)
    beta_min_magnitude: float = 0.1
    a: float = 3.0
    theta: float = 0.0
    b: float = 0.0
    t: Optional[int] = None
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        self.n = _positive_int("n", self.n)
        self.s = _positive_int("s", self.s)
        if self.s > self.n:
            raise ConfigurationError(f"s={self.s} exceeds n={self.n}")
        if not self.sample_sizes:
            raise ConfigurationError("sample_sizes must not be empty")
        self.sample_sizes = [_positive_int("sample size", m) for m in self.sample_sizes]
        self.sigma = float(self.sigma)
        if self.sigma < 0 or not math.isfinite(self.sigma):
            raise ConfigurationError(f"sigma must be nonnegative, got {self.sigma}")
        self.num_trials = _positive_int("num_trials", self.num_trials)
        if not self.methods:
            raise ConfigurationError("methods must not be empty")
        self.methods = [m if isinstance(m, MethodSpec) else MethodSpec.from_dict(m) for m in self.methods]
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ConfigurationError(f"Duplicate method names: {names}")
        self.cv_folds = _positive_int("cv_folds", self.cv_folds)
        if self.cv_folds < 2:
            raise ConfigurationError(f"cv_folds must be at least 2, got {self.cv_folds}")
        if self.lambda_grid is not None:
            if not self.lambda_grid:
                raise ConfigurationError("lambda_grid must not be empty")
            self.lambda_grid = [_positive_float("lambda_grid entry", lam) for lam in self.lambda_grid]
        self.num_lambdas = _positive_int("num_lambdas", self.num_lambdas)
        self.lambda_ratio = _positive_float("lambda_ratio", self.lambda_ratio)
        if self.lambda_ratio >= 1:
            raise ConfigurationError(f"lambda_ratio must be below 1, got {self.lambda_ratio}")
        self.support_tol = _positive_float("support_tol", self.support_tol)
        self.master_seed = int(self.master_seed)
        if isinstance(self.covariance, dict):
            self.covariance = CovarianceSpec.from_dict(self.covariance)
        self.beta_min_magnitude = float(self.beta_min_magnitude)
        if self.beta_min_magnitude < 0:
            raise ConfigurationError(f"beta_min_magnitude must be nonnegative, got {self.beta_min_magnitude}")
        self.a = float(self.a)
        if not self.a > 1:
            raise ConfigurationError(f"a must exceed 1, got {self.a}")
        self.theta = float(self.theta)
        if not 0 <= self.theta < 1:
            raise ConfigurationError(f"theta must lie in [0, 1), got {self.theta}")
        self.b = float(self.b)
        if self.b < 0:
            raise ConfigurationError(f"b must be nonnegative, got {self.b}")
        if self.t is not None:
            self.t = _positive_int("t", self.t)
            if self.t < self.s:
                raise ConfigurationError(f"t={self.t} must be at least s={self.s}")
        if isinstance(self.solver, dict):
            self.solver = SolverOptions.from_dict(self.solver)

    @property
    def effective_t(self) -> int:
        return self.t if self.t is not None else self.s

    @classmethod
    def paper_preset(cls) -> Self:
        """n=1024, s=102, σ=0.01, the six-point ladder, 100 trials, 10-fold CV."""
        return cls()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        """Create a configuration from a mapping (nested records as dicts)."""
        if not isinstance(data, dict):
            raise ConfigurationError("Experiment configuration must be a dictionary")
        data = dict(data)
        if data.pop("preset", None) == "paper":
            base = cls.paper_preset().to_dict()
            base.update(data)
            data = base
        _reject_unknown(cls, data)
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigurationError(f"Invalid experiment configuration: {e}") from e

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> Self:
        """
        Load a YAML or JSON configuration, or the ``config`` block of a run manifest.

        Raises:
            ConfigurationError: If the file cannot be read or parsed.
        """
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
            data = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
        except (OSError, ValueError, yaml.YAMLError) as e:
            raise ConfigurationError(f"Failed to read configuration {path}: {e}") from e
        if isinstance(data, dict) and "config" in data and "tool_version" in data:
            data = data["config"]
        return cls.from_dict(data or {})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "s": self.s,
            "sample_sizes": list(self.sample_sizes),
            "sigma": self.sigma,
            "num_trials": self.num_trials,
            "methods": [m.to_dict() for m in self.methods],
            "cv_folds": self.cv_folds,
            "lambda_grid": None if self.lambda_grid is None else list(self.lambda_grid),
            "num_lambdas": self.num_lambdas,
            "lambda_ratio": self.lambda_ratio,
            "support_tol": self.support_tol,
            "master_seed": self.master_seed,
            "covariance": self.covariance.to_dict(),
            "beta_min_magnitude": self.beta_min_magnitude,
            "a": self.a,
            "theta": self.theta,
            "b": self.b,
            "t": self.t,
            "solver": self.solver.to_dict(),
        }

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form of the resolved configuration."""
        return config_digest(self.to_dict())

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)
