import math

import numpy as np
import pytest

from abplab.degiorgi import (DeGiorgiInput, level_machinery, s_infinity,
                             verify_hypothesis)
from abplab.grid import GridField, GridSpec


def test_s_infinity_exact_values():
    # 2*3*1^0.5/(1 - 2^-0.5) + 2 = 6/(1 - 1/sqrt(2)) + 2
    assert s_infinity(DeGiorgiInput(c0=3.0, delta=0.5, s0=2.0, phi_s0=1.0)) \
        == pytest.approx(6.0 / (1.0 - 2.0**-0.5) + 2.0)
    # delta = 1: 2*0.5*4/(1/2) + 1 = 9
    assert s_infinity(DeGiorgiInput(c0=0.5, delta=1.0, s0=1.0, phi_s0=4.0)) \
        == pytest.approx(9.0)
    assert s_infinity(DeGiorgiInput(c0=1.0, delta=1.0, s0=0.0, phi_s0=0.0)) \
        == pytest.approx(0.0)


def test_input_validation():
    with pytest.raises(ValueError):
        DeGiorgiInput(c0=0.0, delta=0.5, s0=0.0, phi_s0=1.0)
    with pytest.raises(ValueError):
        DeGiorgiInput(c0=1.0, delta=0.5, s0=0.0, phi_s0=-1.0)
    with pytest.raises(ValueError):
        DeGiorgiInput(c0=1.0, delta=0.5, s0=0.0, phi_s0=1.0,
                      s_samples=np.array([0.0, 1.0]), phi_samples=None)
    with pytest.raises(ValueError, match="nonincreasing"):
        DeGiorgiInput(c0=1.0, delta=0.5, s0=0.0, phi_s0=1.0,
                      s_samples=np.array([0.0, 1.0]),
                      phi_samples=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        s_infinity(DeGiorgiInput(c0=1.0, delta=-0.5, s0=0.0, phi_s0=1.0))


def test_hypothesis_on_exact_power_decay():
    """phi(s) = (1 - s/S)_+^2 satisfies t phi(s+t) <= C0 phi(s)^{1.5} with
    C0 = S: substitute u = 1 - s/S, tau = t/S; tau (u - tau)^2 <= u^3
    because the cubic u^3 - tau(u - tau)^2 has no root with 0 < tau < u."""
    S = 4.0
    s = np.linspace(0.0, S, 201)
    phi = np.clip(1.0 - s / S, 0.0, None) ** 2
    rep = verify_hypothesis(s, phi, c0=S, delta=0.5)
    assert rep.holds
    assert rep.worst_margin >= 0.0


def test_hypothesis_rejects_slow_decay():
    """exponential decay has no vanishing level, so the power-type premise
    must fail once t is large enough"""
    s = np.linspace(0.0, 40.0, 401)
    phi = np.exp(-s)
    rep = verify_hypothesis(s, phi, c0=1.0, delta=0.5)
    assert not rep.holds
    assert rep.worst_margin < 0.0
    worst_s, worst_t = rep.worst_pair
    assert worst_t > 0.0


def test_hypothesis_respects_s0():
    # a violation below s0 is ignored
    s = np.array([0.0, 1.0, 2.0, 3.0])
    phi = np.array([1.0, 1.0, 0.0, 0.0])
    assert not verify_hypothesis(s, phi, c0=0.1, delta=1.0).holds
    assert verify_hypothesis(s, phi, c0=0.1, delta=1.0, s0=2.0).holds


def test_hypothesis_input_validation():
    with pytest.raises(ValueError):
        verify_hypothesis(np.array([0.0, 0.0]), np.array([1.0, 1.0]),
                          c0=1.0, delta=0.5)
    with pytest.raises(ValueError):
        verify_hypothesis(np.array([0.0]), np.array([1.0]), c0=1.0, delta=0.5)


def _bump_curves(resolution=96):
    spec = GridSpec(n=1, resolution=resolution)
    v = GridField(spec, 1.0 - spec.radius_sq)
    F = GridField(spec, np.ones(spec.shape))
    return level_machinery(v, F)


def test_level_curves_shapes_and_monotonicity():
    curves = _bump_curves()
    assert curves.phi.shape == curves.s.shape == curves.a.shape
    assert np.all(np.diff(curves.phi) <= 1e-12)
    assert np.all(np.diff(curves.a) <= 1e-12)
    assert np.all(curves.a >= -1e-15)


def test_level_curves_closed_form():
    """v = 1 - r^2, F = 1, n = 1: {v > s} is the disc of radius sqrt(1-s),
    so phi(s) = pi (1-s) and A_s = int (1 - r^2 - s) = pi (1-s)^2 / 2."""
    curves = _bump_curves(resolution=192)
    keep = curves.s <= 0.9                      # stay clear of the tiny cap
    phi_exact = math.pi * (1.0 - curves.s)
    a_exact = 0.5 * math.pi * (1.0 - curves.s) ** 2
    assert np.max(np.abs(curves.phi - phi_exact)[keep]) < 2e-2
    assert np.max(np.abs(curves.a - a_exact)[keep]) < 2e-3


def test_chain_margin_nonnegative_on_bump():
    curves = _bump_curves()
    assert curves.chain_margin() >= -1e-3


def test_level_machinery_validation():
    spec = GridSpec(n=1, resolution=32)
    other = GridSpec(n=1, resolution=48)
    v = GridField(spec, 1.0 - spec.radius_sq)
    with pytest.raises(ValueError):
        level_machinery(v, GridField(other, np.ones(other.shape)))
    with pytest.raises(ValueError, match="nonnegative"):
        level_machinery(v, GridField(spec, -np.ones(spec.shape)))


def test_curves_feed_the_lemma():
    """wire phi from the grid into the lemma the way the sup bound does:
    A_s >= t phi(s+t) supplies the hypothesis with C0 = A_{s0}/phi(s0)^{1+d}"""
    curves = _bump_curves(resolution=128)
    keep = curves.phi > 1e-8
    s, phi, a = curves.s[keep], curves.phi[keep], curves.a[keep]
    delta = 1.0
    c0 = float(np.max(a / phi ** (1.0 + delta))) * (1.0 + 1e-9)
    rep = verify_hypothesis(s, phi, c0=c0, delta=delta)
    assert rep.holds
    inp = DeGiorgiInput(c0=c0, delta=delta, s0=float(s[0]),
                        phi_s0=float(phi[0]))
    bound = s_infinity(inp)
    assert bound >= 1.0             # the true sup of v
    assert bound < 50.0             # and not vacuous
