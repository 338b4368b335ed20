"""
Closed-form tuning rules, recovery bounds, probability floors and sample-size
thresholds for ℓq minimization and regularization.

Everything here is plain arithmetic on the inputs. Logarithms are natural.
Quantities that involve the universal constants of the Gaussian-design
concentration bounds are only meaningful up to those constants;
``bounds_report`` labels them so.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, NamedTuple, Optional

import numpy as np
import numpy.typing as npt
from typing_extensions import Self

from lqrecover.core import as_matrix, as_vector, lq_power, lq_quasi_norm
from lqrecover.exceptions import ConfigurationError, DataShapeError
from lqrecover.regularity import RecParams


logger = logging.getLogger(__name__)

UNIVERSAL_CONSTANTS_LABEL = "up to universal constants"


@dataclass(frozen=True)
class TuningParams:
    """Inputs of the tuning rule.

    Attributes:
        sigma: Noise standard deviation, > 0.
        m: Sample size.
        n: Number of features.
        a: Cone constant, > 1.
        theta: Column-norm slack, in [0, 1).
        b: Probability exponent, ≥ 0.
        r: Radius with r ≥ ‖β*‖_q, > 0.
        q: Exponent in (0, 1].
    """
    sigma: float
    m: int
    n: int
    a: float = 3.0
    theta: float = 0.0
    b: float = 0.0
    r: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")
        for name in ("m", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ConfigurationError(f"{name} must be a positive integer, got {value!r}")
        if not self.a > 1:
            raise ConfigurationError(f"a must exceed 1, got {self.a}")
        if not 0 <= self.theta < 1:
            raise ConfigurationError(f"theta must lie in [0, 1), got {self.theta}")
        if self.b < 0:
            raise ConfigurationError(f"b must be nonnegative, got {self.b}")
        if not self.r > 0:
            raise ConfigurationError(f"r must be positive, got {self.r}")
        if not 0 < self.q <= 1:
            raise ConfigurationError(f"q must lie in (0, 1], got {self.q}")

    @classmethod
    def for_truth(cls, beta_star: npt.ArrayLike, sigma: float, m: int, q: float, **kwargs: Any) -> Self:
        """Tuning inputs with the tightest admissible radius r = ‖β*‖_q."""
        r = lq_quasi_norm(beta_star, q)
        return cls(sigma=sigma, m=m, n=len(np.atleast_1d(beta_star)), q=q,
                   r=max(r, np.finfo(float).tiny), **kwargs)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class UniversalConstants:
    """Constants c1..c4 and τ ≥ 1 of the Gaussian-design concentration bounds (1 by default)."""
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    c4: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "c4"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.tau >= 1:
            raise ConfigurationError(f"tau must be at least 1, got {self.tau}")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


class LambdaChoice(NamedTuple):
    lam: float
    rho: float


class RegularizedBounds(NamedTuple):
    prediction: float
    oracle: float
    l2: float


class Inequality(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def _log_n(n: int) -> float:
    return math.log(n)


def epsilon_default(sigma: float, m: int) -> float:
    """ε = σ√(5m), the data-fit radius used by the theory."""
    return sigma * math.sqrt(5.0 * m)


def epsilon_experiment(sigma: float, m: int) -> float:
    """ε = σ√(m + 2√(2m)), the radius used in simulations."""
    return sigma * math.sqrt(m + 2.0 * math.sqrt(2.0 * m))


def lambda_default(p: TuningParams) -> LambdaChoice:
    """
    λ = max{ ((a+1)/(a−1))·σ(1+θ)·2^{1−q}(1+r^q)^{(1−q)/q}·√(2(1+b)ln n/m), (5/2)σ² }
    together with ρ = (5σ²/(2λ) + r^q)^{1/q}.
    """
    q = p.q
    noise_branch = (
        (p.a + 1.0) / (p.a - 1.0)
        * p.sigma * (1.0 + p.theta)
        * 2.0 ** (1.0 - q)
        * (1.0 + p.r ** q) ** ((1.0 - q) / q)
        * math.sqrt(2.0 * (1.0 + p.b) * _log_n(p.n) / p.m)
    )
    lam = max(noise_branch, 2.5 * p.sigma ** 2)
    rho = (5.0 * p.sigma ** 2 / (2.0 * lam) + p.r ** q) ** (1.0 / q)
    return LambdaChoice(lam, rho)


def l1_lambda(sigma: float, m: int, n: int, theta: float = 0.0, b: float = 0.0) -> float:
    """λ = 2σ(1+θ)√(2(1+b)ln n/m), the ℓ1 rule with a = 3."""
    return 2.0 * sigma * (1.0 + theta) * math.sqrt(2.0 * (1.0 + b) * _log_n(n) / m)


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise ConfigurationError(f"{name} must be positive, got {value}")


def _check_st(q: float, s: int, t: int) -> None:
    if not 0 < q <= 1:
        raise ConfigurationError(f"q must lie in (0, 1], got {q}")
    if s < 1 or t < 1:
        raise ConfigurationError(f"s and t must be positive, got s={s}, t={t}")


def theorem1_bound(phi: float, q: float, s: int, t: int, epsilon: float) -> float:
    """(1 + (s/t)^{2/q−1})·4ε²/φ², the constrained-problem bound for a deterministic design."""
    _positive("phi", phi)
    _check_st(q, s, t)
    return (1.0 + (s / t) ** (2.0 / q - 1.0)) * 4.0 * epsilon ** 2 / phi ** 2


def _regularized_triple(
    base: float, q: float, s: int, t: int, a: float, lam: float, c_pred: float, c_oracle: float, c_l2: float
) -> RegularizedBounds:
    power = 2.0 / (2.0 - q)
    prediction = (c_pred * a * lam / base ** q) ** power * s
    oracle = (c_oracle * a * lam / base ** q) ** power * s
    l2 = (1.0 + a ** (2.0 / q) * (s / t) ** (2.0 / q - 1.0)) * (c_l2 * a * lam / base ** 2) ** power * s
    return RegularizedBounds(prediction, oracle, l2)


def theorem2_bounds(phi: float, m: int, q: float, s: int, t: int, a: float, lam: float) -> RegularizedBounds:
    """
    Prediction, oracle and ℓ2 bounds of the regularized problem for a deterministic design.

    With φ̃ = φ/√m:
        prediction = (2aλ/φ̃^q)^{2/(2−q)}·s
        oracle     = (2^{q/2}aλ/φ̃^q)^{2/(2−q)}·s
        l2         = (1 + a^{2/q}(s/t)^{2/q−1})·(2aλ/φ̃²)^{2/(2−q)}·s

    The ℓ2 bound divides by φ̃² while the other two divide by φ̃^q; both
    follow the displayed formulas.
    """
    _positive("phi", phi)
    _positive("lam", lam)
    _check_st(q, s, t)
    return _regularized_triple(phi / math.sqrt(m), q, s, t, a, lam, 2.0, 2.0 ** (q / 2.0), 2.0)


def theorem34_bounds(
    phi_sigma_half: float, m: int, q: float, s: int, t: int, a: float, lam: float, epsilon: float
) -> Dict[str, Any]:
    """
    Bounds for a Gaussian random design in terms of φ_q(s, t, ·, Σ^{1/2}).

    Returns:
        {"cp_l2": 16(1 + (s/t)^{2/q−1})ε²/(m·φ²), "rp": RegularizedBounds with
        constants 2^{q+1}, 8^{q/2} and 8}
    """
    _positive("phi_sigma_half", phi_sigma_half)
    _positive("lam", lam)
    _check_st(q, s, t)
    cp_l2 = 16.0 * (1.0 + (s / t) ** (2.0 / q - 1.0)) * epsilon ** 2 / (m * phi_sigma_half ** 2)
    rp = _regularized_triple(phi_sigma_half, q, s, t, a, lam, 2.0 ** (q + 1.0), 8.0 ** (q / 2.0), 8.0)
    return {"cp_l2": cp_l2, "rp": rp}


def _clip(p: float) -> float:
    return min(1.0, max(0.0, p))


def probability_floors(
    m: int,
    n: int,
    b: float = 0.0,
    constants: Optional[UniversalConstants] = None,
    theta: float = 0.0,
) -> Dict[str, float]:
    """
    Lower bounds on the probabilities of the good events, clipped to [0, 1].

    Keys: ``A`` (noise norm), ``B`` (noise correlation), ``A_and_B``, ``C``
    (REC transfer to X), ``D`` (column norms), and the random-design
    guarantees ``random_constrained`` and ``random_regularized``. For n = 1
    the B-type floors are 0.
    """
    constants = constants or UniversalConstants()
    miss_a = math.exp(-m)
    log_n = _log_n(n)
    miss_b = 1.0 / (n ** b * math.sqrt(math.pi * log_n)) if log_n > 0 else math.inf
    miss_c = math.exp(-constants.c2 * m)
    miss_d = 2.0 * math.exp(-constants.c4 * theta ** 2 * m / constants.tau ** 4)

    floors = {
        "A": _clip(1.0 - miss_a),
        "B": _clip(1.0 - miss_b),
        "A_and_B": _clip(1.0 - miss_a - miss_b),
        "C": _clip(1.0 - miss_c),
        "D": _clip(1.0 - miss_d),
    }
    floors["random_constrained"] = _clip(floors["A"] * floors["C"])
    floors["random_regularized"] = _clip(floors["A_and_B"] * _clip(1.0 - miss_c - miss_d))
    return floors


def sample_size_thresholds(
    rec: RecParams,
    phi_sigma_half: float,
    zeta_sigma: float,
    n: int,
    theta: float,
    constants: Optional[UniversalConstants] = None,
) -> Dict[str, float]:
    """
    Sample sizes above which the random-design guarantees apply.

    Returns:
        ``rec_sample``: c1·ζ(Σ)/φ²·(√(s+t) + a√s(as/t)^{1/q−1})²·ln n,
        ``x_theta_sample``: c3·τ⁴·θ^{−2}·ln n (infinite for θ = 0),
        ``combined``: their maximum.
    """
    _positive("phi_sigma_half", phi_sigma_half)
    _positive("zeta_sigma", zeta_sigma)
    constants = constants or UniversalConstants()
    q, s, t, a = rec.q, rec.s, rec.t, rec.a
    log_n = _log_n(n)
    spread = math.sqrt(s + t) + a * math.sqrt(s) * (a * s / t) ** (1.0 / q - 1.0)
    rec_sample = constants.c1 * zeta_sigma / phi_sigma_half ** 2 * spread ** 2 * log_n
    x_theta = constants.c3 * constants.tau ** 4 / theta ** 2 * log_n if theta > 0 else math.inf
    return {"rec_sample": rec_sample, "x_theta_sample": x_theta, "combined": max(rec_sample, x_theta)}


def noise_norm_tail(m: int, d: float) -> float:
    """Upper bound exp(−(d−1)m/4) on P(‖e‖₂² ≥ d·m·σ²), valid for d ≥ 5."""
    if d < 5:
        raise ConfigurationError(f"the chi-square tail bound needs d >= 5, got {d}")
    return math.exp(-(d - 1.0) * m / 4.0)


@dataclass
class EventIndicators:
    """Whether one noise draw lies in the good events, with the quantities compared."""
    A: bool
    B: bool
    D: bool
    noise_norm: float
    epsilon: float
    correlation: float
    lam: float
    max_column_norm: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def event_indicators(X: npt.ArrayLike, e: npt.ArrayLike, p: TuningParams) -> EventIndicators:
    """
    Evaluate the noise events for a design and a noise draw.

    A: ‖e‖₂ ≤ σ√(5m). B: ((a+1)/((a−1)m))(2ρ)^{1−q}‖Xᵀe‖∞ ≤ λ with (λ, ρ)
    from ``lambda_default``. D: every column has norm ≤ (1+θ)√m.
    """
    X = as_matrix(X)
    e = as_vector(e, "e", X.shape[0])
    m = X.shape[0]
    if p.m != m or p.n != X.shape[1]:
        raise DataShapeError(f"Tuning parameters are for {p.m}x{p.n} but the design is {m}x{X.shape[1]}")
    lam, rho = lambda_default(p)
    eps = epsilon_default(p.sigma, m)
    noise_norm = float(np.linalg.norm(e))
    correlation = (p.a + 1.0) / ((p.a - 1.0) * m) * (2.0 * rho) ** (1.0 - p.q) * float(np.max(np.abs(X.T @ e)))
    max_col = float(np.max(np.linalg.norm(X, axis=0)))
    return EventIndicators(
        A=noise_norm <= eps,
        B=correlation <= lam,
        D=max_col <= (1.0 + p.theta) * math.sqrt(m),
        noise_norm=noise_norm,
        epsilon=eps,
        correlation=correlation,
        lam=lam,
        max_column_norm=max_col,
    )


def l1_from_lq_bound(delta: npt.ArrayLike, rho: float, q: float) -> Inequality:
    """Check ‖δ‖₁ ≤ (2ρ)^{1−q}‖δ‖_q^q."""
    _positive("rho", rho)
    delta = as_vector(delta, "delta")
    lhs = float(np.sum(np.abs(delta)))
    rhs = (2.0 * rho) ** (1.0 - q) * lq_power(delta, q)
    return Inequality(lhs, rhs, lhs <= rhs * (1.0 + 1e-12))


@dataclass
class TheoremBounds:
    """All tuning values and bounds for one configuration.

    Bounds whose modulus was not supplied are None.
    """
    epsilon: float
    rho: float
    lam: float
    cp_l2_bound: Optional[float]
    rp_prediction: Optional[float]
    rp_oracle: Optional[float]
    rp_l2: Optional[float]
    random_cp_l2: Optional[float]
    random_rp_prediction: Optional[float]
    random_rp_oracle: Optional[float]
    random_rp_l2: Optional[float]
    prob_floor: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def theorem_bounds(
    p: TuningParams,
    s: int,
    t: int,
    phi: Optional[float] = None,
    phi_sigma_half: Optional[float] = None,
    lam: Optional[float] = None,
    epsilon: Optional[float] = None,
) -> TheoremBounds:
    """
    Evaluate every bound for the tuning inputs ``p``.

    Args:
        p: Tuning inputs.
        s: Sparsity of β*.
        t: Batch size, s ≤ t.
        phi: φ_q(s, t, a, X) of a fixed design. Since the cone with a > 1
            contains the one with a = 1, the same value is a valid (looser)
            modulus for the constrained bound.
        phi_sigma_half: φ_q(s, t, a, Σ^{1/2}) for the random-design bounds.
        lam: λ to plug in; defaults to ``lambda_default(p)``.
        epsilon: ε to plug in; defaults to σ√(5m).

    Returns:
        TheoremBounds with ``prob_floor`` the floor of P(A ∩ B).
    """
    choice = lambda_default(p)
    lam = choice.lam if lam is None else lam
    eps = epsilon_default(p.sigma, p.m) if epsilon is None else epsilon
    cp = rp = rcp = rrp = None
    if phi is not None and phi > 0:
        cp = theorem1_bound(phi, p.q, s, t, eps)
        rp = theorem2_bounds(phi, p.m, p.q, s, t, p.a, lam)
    if phi_sigma_half is not None and phi_sigma_half > 0:
        random = theorem34_bounds(phi_sigma_half, p.m, p.q, s, t, p.a, lam, eps)
        rcp, rrp = random["cp_l2"], random["rp"]
    return TheoremBounds(
        epsilon=eps,
        rho=choice.rho,
        lam=lam,
        cp_l2_bound=cp,
        rp_prediction=None if rp is None else rp.prediction,
        rp_oracle=None if rp is None else rp.oracle,
        rp_l2=None if rp is None else rp.l2,
        random_cp_l2=rcp,
        random_rp_prediction=None if rrp is None else rrp.prediction,
        random_rp_oracle=None if rrp is None else rrp.oracle,
        random_rp_l2=None if rrp is None else rrp.l2,
        prob_floor=probability_floors(p.m, p.n, p.b)["A_and_B"],
    )


def bounds_report(
    p: TuningParams,
    s: int = 1,
    t: Optional[int] = None,
    phi: Optional[float] = None,
    phi_sigma_half: Optional[float] = None,
    zeta_sigma: float = 1.0,
    constants: Optional[UniversalConstants] = None,
) -> Dict[str, Any]:
    """JSON-ready report of the tuning values, bounds, probability floors and sample sizes."""
    constants = constants or UniversalConstants()
    t = s if t is None else t
    choice = lambda_default(p)
    report: Dict[str, Any] = {
        "label": UNIVERSAL_CONSTANTS_LABEL,
        "tuning": p.to_dict(),
        "s": s,
        "t": t,
        "epsilon": epsilon_default(p.sigma, p.m),
        "epsilon_experiment": epsilon_experiment(p.sigma, p.m),
        "lambda": choice.lam,
        "rho": choice.rho,
        "l1_lambda": l1_lambda(p.sigma, p.m, p.n, p.theta, p.b),
        "bounds": theorem_bounds(p, s, t, phi, phi_sigma_half).to_dict(),
        "probability_floors": probability_floors(p.m, p.n, p.b, constants, p.theta),
        "universal_constants": constants.to_dict(),
    }
    if phi_sigma_half is not None and s + t <= p.n:
        rec = RecParams(p.q, s, t, p.a)
        report["sample_size_thresholds"] = sample_size_thresholds(rec, phi_sigma_half, zeta_sigma, p.n, p.theta, constants)
    return report
