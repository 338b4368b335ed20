"""
Tests for the scalar penalties and their proximal maps.
"""

import numpy as np
import pytest

from lqrecover.exceptions import ConfigurationError
from lqrecover.penalties import PenaltyKind, PenaltySpec, build_penalty, prox_penalty


ALL_PENALTIES = [
    PenaltySpec(PenaltyKind.L0, 1.0),
    PenaltySpec(PenaltyKind.LQ, 1.0, q=0.5),
    PenaltySpec(PenaltyKind.LQ, 1.0, q=2.0 / 3.0),
    PenaltySpec(PenaltyKind.L1, 1.0),
    PenaltySpec(PenaltyKind.SCAD, 1.0),
    PenaltySpec(PenaltyKind.MCP, 1.0),
]


@pytest.mark.parametrize("pen", ALL_PENALTIES, ids=lambda p: p.kind.value + str(p.q or ""))
def test_prox_is_global_minimizer(pen):
    """Test the prox against a brute-force grid search of the scalar objective."""
    rng = np.random.default_rng(7)
    penalty = build_penalty(pen)
    grid = np.linspace(-6.0, 6.0, 120001)

    for _ in range(40):
        v = rng.uniform(-5.0, 5.0)
        tau = rng.uniform(0.01, 3.0)

        x = prox_penalty(v, tau, pen)
        best_grid = float(np.min(penalty.scalar_objective(grid, v, tau)))
        found = float(penalty.scalar_objective(x, v, tau))

        # Check the prox is at least as good as every grid point
        assert found <= best_grid + 1e-9


def test_prox_non_convex_variant():
    """Test the Newton branch for an exponent without a closed form."""
    pen = PenaltySpec(PenaltyKind.LQ, 1.0, q=0.3)
    penalty = build_penalty(pen)
    grid = np.linspace(-6.0, 6.0, 120001)

    for v in [-4.0, -1.2, 0.3, 1.0, 2.5, 4.9]:
        x = prox_penalty(v, 0.7, pen)
        assert penalty.scalar_objective(x, v, 0.7) <= np.min(penalty.scalar_objective(grid, v, 0.7)) + 1e-9


def test_soft_and_hard_thresholding():
    """Test the closed forms for ℓ1 and ℓ0."""
    l1 = PenaltySpec(PenaltyKind.L1, 1.0)
    l0 = PenaltySpec(PenaltyKind.L0, 1.0)

    assert prox_penalty(3.0, 1.0, l1) == pytest.approx(2.0)
    assert prox_penalty(-0.5, 1.0, l1) == 0.0
    # (1/2)v² > τ keeps v
    assert prox_penalty(1.5, 1.0, l0) == pytest.approx(1.5)
    assert prox_penalty(1.4, 1.0, l0) == 0.0


def test_half_thresholding_stationarity():
    """Test that a nonzero ℓ1/2 prox solves u − w + τ/(2√u) = 0."""
    pen = PenaltySpec(PenaltyKind.LQ, 1.0, q=0.5)

    u = prox_penalty(2.0, 1.0, pen)

    assert u > 0
    assert u - 2.0 + 0.5 / np.sqrt(u) == pytest.approx(0.0, abs=1e-10)
    # below 1.5τ^{2/3} the prox is zero
    assert prox_penalty(1.4, 1.0, pen) == 0.0


def test_prox_array_shape_and_sign():
    """Test elementwise application on arrays."""
    pen = PenaltySpec(PenaltyKind.L1, 1.0)

    out = prox_penalty(np.array([[-3.0, 0.2], [2.0, -0.1]]), 0.5, pen)

    assert out.shape == (2, 2)
    assert np.allclose(out, [[-2.5, 0.0], [1.5, 0.0]])


def test_prox_rejects_non_positive_tau():
    """Test that a zero weight raises."""
    with pytest.raises(ConfigurationError):
        prox_penalty(1.0, 0.0, PenaltySpec(PenaltyKind.L1, 1.0))


def test_penalty_spec_validation():
    """Test the constructor checks of PenaltySpec."""
    with pytest.raises(ConfigurationError):
        PenaltySpec(PenaltyKind.LQ, 1.0, q=1.0)
    with pytest.raises(ConfigurationError):
        PenaltySpec(PenaltyKind.L1, -1.0)
    with pytest.raises(ConfigurationError):
        PenaltySpec(PenaltyKind.SCAD, 1.0, scad_a=1.5)
    with pytest.raises(ConfigurationError):
        PenaltySpec("elastic", 1.0)


def test_penalty_spec_helpers():
    """Test for_q, from_dict and to_dict."""
    assert PenaltySpec.for_q(0, 0.1).kind is PenaltyKind.L0
    assert PenaltySpec.for_q(1, 0.1).kind is PenaltyKind.L1
    assert PenaltySpec.for_q(0.5, 0.1).q == 0.5

    spec = PenaltySpec.from_dict({"kind": "lq", "lambda": 0.2, "q": 0.5})
    assert spec.lam == 0.2
    assert spec.to_dict() == {"kind": "lq", "lambda": 0.2, "q": 0.5}
    assert spec.with_lambda(0.3).lam == 0.3
    assert spec.exponent == 0.5

    with pytest.raises(ConfigurationError):
        PenaltySpec.from_dict({"kind": "l1", "lambda": 0.2, "gamma": 1})


def test_scad_and_mcp_flatten():
    """Test that SCAD and MCP are constant beyond their concavity range."""
    scad = build_penalty(PenaltySpec(PenaltyKind.SCAD, 0.5))
    mcp = build_penalty(PenaltySpec(PenaltyKind.MCP, 0.5))

    # λρ equals the textbook penalty: λ|x| near zero
    assert 0.5 * scad.rho(0.1) == pytest.approx(0.05)
    assert scad.rho(10.0) == pytest.approx(scad.rho(20.0))
    assert mcp.rho(10.0) == pytest.approx(mcp.rho(20.0))
