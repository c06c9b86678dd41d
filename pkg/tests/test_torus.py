import math

import numpy as np
import pytest

from abplab.torus import (PeriodicSpec, gradient_report, make_pair,
                          periodic_complex_hessian, periodic_gradient_sq,
                          positivity_threshold, random_band_shape,
                          single_mode_shape, sweep_family, two_mode_shape)


def test_spec_validation():
    with pytest.raises(ValueError):
        PeriodicSpec(n=0, resolution=32)
    with pytest.raises(ValueError):
        PeriodicSpec(n=1, resolution=7)
    spec = PeriodicSpec(n=1, resolution=32)
    assert spec.h == 1.0 / 32.0
    assert spec.shape == (32, 32)
    assert spec.mean(np.ones(spec.shape)) == 1.0


def test_hessian_of_single_mode():
    """phi = cos(2 pi x1) has phi_{z zbar} = -pi^2 cos(2 pi x1) up to the
    sin(pi h)/(pi h) factor of the periodic stencil"""
    spec = PeriodicSpec(n=1, resolution=64)
    x, _ = spec.node_coords()
    phi = np.cos(2.0 * math.pi * x) + np.zeros(spec.shape)
    hess = periodic_complex_hessian(phi, spec)
    assert hess.shape == spec.shape + (1, 1)
    damp = (math.sin(math.pi * spec.h) / (math.pi * spec.h)) ** 2
    exact = -math.pi**2 * damp * np.cos(2.0 * math.pi * x) + np.zeros(spec.shape)
    assert np.max(np.abs(hess[..., 0, 0].real - exact)) < 1e-10
    assert np.max(np.abs(hess[..., 0, 0].imag)) < 1e-12


def test_gradient_sq_of_single_mode():
    spec = PeriodicSpec(n=1, resolution=64)
    x, _ = spec.node_coords()
    phi = np.sin(2.0 * math.pi * x) + np.zeros(spec.shape)
    damp = (math.sin(2.0 * math.pi * spec.h) / (2.0 * math.pi * spec.h)) ** 2
    exact = 0.25 * (2.0 * math.pi) ** 2 * damp * np.cos(2.0 * math.pi * x) ** 2
    got = periodic_gradient_sq(phi, spec)
    assert np.max(np.abs(got - (exact + np.zeros(spec.shape)))) < 1e-10


def test_positivity_threshold_single_mode():
    """worst eigenvalue of the mode Hessian is -pi^2 at x = 0, so the
    threshold is 1/pi^2 modulo the stencil damping"""
    spec = PeriodicSpec(n=1, resolution=64)
    thr = positivity_threshold(single_mode_shape(1), spec)
    assert thr == pytest.approx(1.0 / math.pi**2, rel=2e-3)


def test_make_pair_normalizes_volume():
    spec = PeriodicSpec(n=1, resolution=32)
    shape = single_mode_shape(1)
    amp = 0.5 * positivity_threshold(shape, spec)
    pair = make_pair(spec, amp * shape.evaluate(spec))
    assert pair.volume_defect() <= 1e-8
    assert spec.mean(np.exp(pair.F)) == pytest.approx(1.0, abs=1e-10)
    # kappa absorbs the mean of log det g
    assert math.isfinite(pair.kappa)


def test_make_pair_rejects_degenerate_metric():
    spec = PeriodicSpec(n=1, resolution=32)
    shape = single_mode_shape(1)
    amp = 1.05 * positivity_threshold(shape, spec)
    with pytest.raises(ValueError, match="not positive"):
        make_pair(spec, amp * shape.evaluate(spec))
    with pytest.raises(ValueError, match="shape"):
        make_pair(spec, np.zeros((8, 8)))


def test_gradient_report_matches_manual_h_field():
    spec = PeriodicSpec(n=1, resolution=48)
    shape = two_mode_shape(1)
    amp = 0.4 * positivity_threshold(shape, spec)
    pair = make_pair(spec, amp * shape.evaluate(spec))
    rep = gradient_report(pair, lambda_=1.0)
    h_field = np.exp(-pair.phi) * periodic_gradient_sq(pair.phi, spec)
    assert rep.h_max == pytest.approx(float(np.max(h_field)), rel=1e-12)
    assert rep.h_l1 == pytest.approx(spec.mean(h_field), rel=1e-12)
    assert rep.entropy_f >= 0.0
    assert rep.ef_lq >= 1.0      # Jensen: mean e^{qF} >= (mean e^F)^q = 1
    assert rep.passed


def test_gradient_report_validation():
    spec = PeriodicSpec(n=1, resolution=16)
    pair = make_pair(spec, 0.01 * single_mode_shape(1).evaluate(spec))
    with pytest.raises(ValueError, match="exceed n"):
        gradient_report(pair, p=1.0)
    with pytest.raises(ValueError, match="exceed 1"):
        gradient_report(pair, q=1.0)
    with pytest.raises(ValueError, match="lambda"):
        gradient_report(pair, lambda_=-1.0)


def test_flat_potential_has_zero_h():
    spec = PeriodicSpec(n=1, resolution=16)
    pair = make_pair(spec, np.zeros(spec.shape))
    rep = gradient_report(pair)
    assert rep.h_max == 0.0
    assert rep.entropy_f == 0.0
    assert rep.ef_lq == pytest.approx(1.0)
    assert rep.lemma_margin == pytest.approx(0.0, abs=1e-12)


def test_sweep_family_fills_amplitude_range():
    spec = PeriodicSpec(n=1, resolution=32)
    shape = single_mode_shape(1)
    fam = sweep_family(shape, spec, count=4, fraction=0.8)
    eps = [e for e, _ in fam]
    assert len(fam) == 4
    assert all(a < b for a, b in zip(eps, eps[1:]))
    assert eps[-1] == pytest.approx(0.8 * positivity_threshold(shape, spec))
    with pytest.raises(ValueError):
        sweep_family(shape, spec, fraction=1.0)


def test_random_shape_is_seed_deterministic():
    a = random_band_shape(1, seed=5, num_modes=6, max_freq=2)
    b = random_band_shape(1, seed=5, num_modes=6, max_freq=2)
    c = random_band_shape(1, seed=6, num_modes=6, max_freq=2)
    assert a.modes == b.modes
    assert a.modes != c.modes
    assert a.max_frequency <= 2
    assert len(a.modes) == 6
    assert all(any(k) for _, k, _ in a.modes)


def test_builtin_shapes():
    assert len(single_mode_shape(2).modes) == 1
    assert two_mode_shape(1).max_frequency == 1
    spec = PeriodicSpec(n=2, resolution=8)
    vals = two_mode_shape(2).evaluate(spec)
    assert vals.shape == spec.shape
    with pytest.raises(ValueError, match="dimension"):
        single_mode_shape(1).evaluate(spec)
