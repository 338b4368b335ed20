"""
Separable penalties and their proximal operators.
"""

from typing import Union

import numpy as np
import numpy.typing as npt

from lqrecover.exceptions import ConfigurationError
from lqrecover.penalties.base import BasePenalty, PenaltyKind, PenaltySpec
from lqrecover.penalties.folded_concave import McpPenalty, ScadPenalty
from lqrecover.penalties.l0 import L0Penalty
from lqrecover.penalties.l1 import L1Penalty
from lqrecover.penalties.lq import LqPenalty


def build_penalty(spec: PenaltySpec) -> BasePenalty:
    """Instantiate the penalty class for a spec."""
    match spec.kind:
        case PenaltyKind.L0:
            return L0Penalty(spec)
        case PenaltyKind.LQ:
            return LqPenalty(spec)
        case PenaltyKind.L1:
            return L1Penalty(spec)
        case PenaltyKind.SCAD:
            return ScadPenalty(spec)
        case PenaltyKind.MCP:
            return McpPenalty(spec)
        case _:
            raise ConfigurationError(f"Unsupported penalty kind: {spec.kind}")


def prox_penalty(
    v: npt.ArrayLike, tau: float, pen: PenaltySpec
) -> Union[float, npt.NDArray[np.float64]]:
    """
    Global minimizer of (1/2)(x − v)² + τρ(x) for the penalty in ``pen``.

    Args:
        v: Scalar or array, processed elementwise.
        tau: Positive prox weight.
        pen: Penalty specification.

    Returns:
        A float for scalar input, otherwise an array shaped like v.

    Raises:
        ConfigurationError: If tau is not positive.
    """
    if not tau > 0:
        raise ConfigurationError(f"tau must be positive, got {tau}")
    out = build_penalty(pen).prox(v, tau)
    if np.ndim(v) == 0:
        return float(out)
    return out


__all__ = [
    "BasePenalty",
    "PenaltyKind",
    "PenaltySpec",
    "L0Penalty",
    "L1Penalty",
    "LqPenalty",
    "ScadPenalty",
    "McpPenalty",
    "build_penalty",
    "prox_penalty",
]
