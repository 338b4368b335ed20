"""
Base class and specification record for separable penalties.
"""

import dataclasses
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Union

import numpy as np
import numpy.typing as npt
from typing_extensions import Self

from lqrecover.exceptions import ConfigurationError


class PenaltyKind(str, Enum):
    """Supported penalty families."""
    L0 = "l0"
    LQ = "lq"
    L1 = "l1"
    SCAD = "scad"
    MCP = "mcp"


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family with its parameters and regularization weight.

    The regularized objective is (1/2m)‖y − Xβ‖² + lam·Σρ(β_i). For SCAD and
    MCP the scalar penalty ρ is the usual p_lam divided by lam, so that
    lam·ρ recovers the textbook penalty.

    Attributes:
        kind: Penalty family.
        lam: Regularization weight λ > 0.
        q: Exponent for LQ, in (0, 1).
        scad_a: SCAD concavity parameter, > 2.
        mcp_gamma: MCP concavity parameter, > 1.
    """
    kind: PenaltyKind
    lam: float
    q: Optional[float] = None
    scad_a: float = 3.7
    mcp_gamma: float = 3.0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", PenaltyKind(self.kind))
        except ValueError as e:
            raise ConfigurationError(f"Unknown penalty kind: {self.kind!r}") from e
        if not (isinstance(self.lam, (int, float)) and self.lam > 0 and math.isfinite(self.lam)):
            raise ConfigurationError(f"lam must be a positive finite number, got {self.lam}")
        if self.kind is PenaltyKind.LQ:
            if self.q is None or not 0.0 < self.q < 1.0:
                raise ConfigurationError(f"LQ penalty needs q in (0, 1), got {self.q}")
        if self.kind is PenaltyKind.SCAD and not self.scad_a > 2.0:
            raise ConfigurationError(f"scad_a must exceed 2, got {self.scad_a}")
        if self.kind is PenaltyKind.MCP and not self.mcp_gamma > 1.0:
            raise ConfigurationError(f"mcp_gamma must exceed 1, got {self.mcp_gamma}")

    @classmethod
    def for_q(cls, q: float, lam: float) -> Self:
        """ℓ0 for q = 0, ℓ1 for q = 1, ℓq otherwise."""
        if q == 0:
            return cls(PenaltyKind.L0, lam)
        if q == 1:
            return cls(PenaltyKind.L1, lam)
        return cls(PenaltyKind.LQ, lam, q=q)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        """Create a spec from a mapping; ``lambda`` is accepted for ``lam``."""
        if not isinstance(data, dict):
            raise ConfigurationError("Penalty data must be a dictionary")
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigurationError(f"Invalid penalty configuration: {e}") from e

    def with_lambda(self, lam: float) -> "PenaltySpec":
        return dataclasses.replace(self, lam=lam)

    @property
    def is_convex(self) -> bool:
        return self.kind is PenaltyKind.L1

    @property
    def exponent(self) -> float:
        """q used for quasi-norm reporting: 0 for ℓ0, 1 for ℓ1, SCAD and MCP."""
        if self.kind is PenaltyKind.L0:
            return 0.0
        if self.kind is PenaltyKind.LQ:
            return float(self.q)
        return 1.0

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind.value, "lambda": self.lam}
        if self.kind is PenaltyKind.LQ:
            out["q"] = self.q
        elif self.kind is PenaltyKind.SCAD:
            out["scad_a"] = self.scad_a
        elif self.kind is PenaltyKind.MCP:
            out["mcp_gamma"] = self.mcp_gamma
        return out


ArrayOrFloat = Union[float, npt.NDArray[np.float64]]


class BasePenalty(ABC):
    """
    Separable penalty with an exact scalar proximal map.

    Subclasses implement ``rho`` (the scalar penalty, applied elementwise)
    and ``shrink``, the global minimizer u ≥ 0 of (1/2)(u − w)² + τρ(u) for
    w = |v| ≥ 0. ``prox`` restores the sign.
    """

    def __init__(self, spec: PenaltySpec):
        self.spec = spec

    @property
    def lam(self) -> float:
        return self.spec.lam

    @property
    def convex(self) -> bool:
        return self.spec.is_convex

    @abstractmethod
    def rho(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """
        Scalar penalty evaluated elementwise.

        Args:
            x: Real array.

        Returns:
            Array of ρ(x_i).
        """
        pass

    @abstractmethod
    def shrink(self, w: npt.NDArray[np.float64], tau: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Magnitude of the prox for nonnegative inputs w with weights tau."""
        pass

    def value(self, beta: npt.ArrayLike) -> float:
        """Σρ(β_i)."""
        return float(np.sum(self.rho(beta)))

    def prox(self, v: npt.ArrayLike, tau: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """
        Elementwise proximal map argmin_x (1/2)(x − v)² + τρ(x).

        Args:
            v: Real array.
            tau: Positive weight, scalar or broadcastable to v.

        Returns:
            Array of the same shape as v.
        """
        v = np.asarray(v, dtype=float)
        tau = np.broadcast_to(np.asarray(tau, dtype=float), v.shape)
        if np.any(tau <= 0):
            raise ConfigurationError("prox weight tau must be positive")
        u = self.shrink(np.abs(v), tau)
        return np.sign(v) * u

    def scalar_objective(self, x: npt.ArrayLike, v: npt.ArrayLike, tau: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """(1/2)(x − v)² + τρ(x), elementwise."""
        x = np.asarray(x, dtype=float)
        return 0.5 * (x - np.asarray(v, dtype=float)) ** 2 + np.asarray(tau, dtype=float) * self.rho(x)

    def _best_of(self, w: npt.NDArray[np.float64], tau: npt.NDArray[np.float64], candidates) -> npt.NDArray[np.float64]:
        """Pick, per entry, the candidate with the lowest scalar objective (first wins ties)."""
        stack = np.stack(np.broadcast_arrays(*candidates))
        scores = 0.5 * (stack - w) ** 2 + tau * self.rho(stack)
        best = np.argmin(scores, axis=0)
        return np.take_along_axis(stack, best[np.newaxis, ...], axis=0)[0]
