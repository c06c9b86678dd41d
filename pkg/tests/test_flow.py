import math

import numpy as np
import pytest

from abplab.abp import AbpConstants, default_delta
from abplab.flow import (FlowConfig, SpaceTimeField, calibrate_parabolic,
                         energy_monotonicity_check, flow_solve,
                         frozen_flow_state, monitor_bounds,
                         parabolic_abp_check, parabolic_alpha_check)
from abplab.grid import GridSpec
from abplab.weights import default_weight


def _constant_cfg(n, mode=None, resolution=65, T=0.1, dt=0.005, value=2.0):
    return FlowConfig(n=n, T=T, dt=dt, resolution=resolution, mode=mode,
                      source=lambda r, t, v=value: v + 0.0 * np.asarray(r),
                      record_every=4)


def test_constant_source_is_exact_radial():
    """f = const c keeps the paraboloid shape: u(t) = r^2 - 1 - c t."""
    cfg = _constant_cfg(n=2, resolution=129)
    state = flow_solve(cfg)
    assert state.times[-1] == pytest.approx(cfg.T)
    final = state.slices[-1]
    exact = final.radii**2 - 1.0 - 2.0 * cfg.T
    assert np.max(np.abs(final.values - exact)) < 1e-9
    assert float(np.max(state.flow_residual)) < 1e-7
    assert state.violations == []


def test_constant_source_is_exact_disc():
    cfg = _constant_cfg(n=1, mode="disc", resolution=32, T=0.05, dt=0.0025)
    state = flow_solve(cfg)
    spec = cfg.grid_spec()
    ball = spec.inside_mask | spec.band_mask
    final = state.slices[-1].values
    exact = spec.radius_sq - 1.0 - 2.0 * cfg.T
    assert np.max(np.abs((final - exact)[ball])) < 1e-10


def test_time_varying_schedule_first_order_accurate():
    """b(t) = t + 0.3 t^2 with f = b'(t) keeps the shape frozen in space;
    implicit stepping tracks it to O(dt)."""
    dt = 0.005
    cfg = FlowConfig(n=1, T=0.2, dt=dt, resolution=257, mode="radial",
                     source=lambda r, t: (1.0 + 0.6 * t) + 0.0 * np.asarray(r),
                     boundary=lambda t: t + 0.3 * t**2,
                     boundary_prime=lambda t: 1.0 + 0.6 * t)
    state = flow_solve(cfg)
    final = state.slices[-1]
    exact = final.radii**2 - 1.0 - (0.2 + 0.3 * 0.04)
    assert np.max(np.abs(final.values - exact)) < 5.0 * dt


def test_monitors_clean_on_solved_flow():
    state = flow_solve(_constant_cfg(n=1, mode="radial", resolution=129))
    rep = monitor_bounds(state)
    assert rep.passed
    assert rep.violations == []
    assert rep.flow_residual_max < 1e-7
    assert rep.grad_max <= rep.grad_threshold
    energy = energy_monotonicity_check(state)
    assert energy.passed
    alpha = parabolic_alpha_check(state, 1.0)
    assert math.isfinite(alpha.max_ratio)
    assert alpha.max_ratio > 0.0


def test_frozen_stalling_boundary_is_flagged():
    """b(t) = tau (1 - e^{-t/tau}) has slope decaying to ~0; the monitor
    must call out the degenerate schedule"""
    T = 0.5
    tau = T / 40.0          # slope decays to e^{-40}, effectively zero
    cfg = FlowConfig(n=1, T=T, dt=0.01, resolution=129, mode="radial",
                     source=lambda r, t: 1.0 + 0.0 * np.asarray(r),
                     boundary=lambda t: tau * (1.0 - math.exp(-t / tau)),
                     boundary_prime=lambda t: math.exp(-t / tau))
    rep = monitor_bounds(frozen_flow_state(cfg))
    assert not rep.passed
    assert any("slope" in v for v in rep.violations)


def test_frozen_source_mismatch_is_flagged():
    """a frozen shape against f = 1 + 0.5 (1 - r^2) leaves the residual
    |b' - f| / f = 1/3 at the origin"""
    cfg = FlowConfig(n=1, T=0.2, dt=0.01, resolution=129, mode="radial",
                     source=lambda r, t: 1.0 + 0.5 * (1.0 - np.asarray(r)**2))
    rep = monitor_bounds(frozen_flow_state(cfg))
    assert not rep.passed
    assert any("residual" in v for v in rep.violations)
    assert rep.flow_residual_max == pytest.approx(1.0 / 3.0, rel=1e-9)


def test_config_validation():
    const = lambda r, t: 1.0 + 0.0 * np.asarray(r)
    with pytest.raises(ValueError):
        FlowConfig(n=1, T=0.0, source=const)
    with pytest.raises(ValueError, match="b\\(0\\)"):
        FlowConfig(n=1, T=0.1, source=const, boundary=lambda t: 1.0 + t,
                   boundary_prime=lambda t: 1.0)
    with pytest.raises(ValueError, match="compatibility"):
        FlowConfig(n=1, T=0.1, source=const, boundary=lambda t: 2.0 * t,
                   boundary_prime=lambda t: 2.0)
    with pytest.raises(ValueError, match="positive"):
        FlowConfig(n=1, T=1.0, source=lambda r, t: 1.0 - 2.0 * t + 0.0 * np.asarray(r))
    with pytest.raises(ValueError, match="disc"):
        FlowConfig(n=2, T=0.1, source=const, mode="disc")
    with pytest.raises(ValueError, match="mode"):
        FlowConfig(n=1, T=0.1, source=const, mode="spherical")


def test_record_schedule_includes_endpoints():
    cfg = FlowConfig(n=1, T=0.1, dt=0.01, resolution=65, mode="radial",
                     source=lambda r, t: 1.0 + 0.0 * np.asarray(r),
                     record_every=7)
    state = flow_solve(cfg)
    assert state.times[0] == 0.0
    assert state.times[-1] == pytest.approx(0.1)
    assert len(state.slices) == len(state.times)


def _linear_member(spec, times, amp):
    u = SpaceTimeField.from_function(
        spec, times,
        lambda *a: amp * (1.0 + a[-1]) * (1.0 - sum(v**2 for v in a[:-1])))
    n = spec.n
    f = SpaceTimeField.from_function(
        spec, times,
        lambda *a: -amp * (1.0 - sum(v**2 for v in a[:-1]))
        - n * amp * (1.0 + a[-1]))
    return u, np.eye(n, dtype=complex), f


def test_parabolic_check_on_linear_family():
    spec = GridSpec(n=1, resolution=48)
    times = np.linspace(0.0, 0.5, 9)
    u, a, f = _linear_member(spec, times, 2.0)
    weight = default_weight(spec.n + 1)
    constants = AbpConstants(c_n=1.0, delta=default_delta(spec.n + 1), c2=3.0)
    rep = parabolic_abp_check(u, a, f, weight, constants)
    # sup over the cylinder is at the origin at t = T; the parabolic
    # boundary peaks at the origin of the initial slice
    assert rep.sup_interior == pytest.approx(2.0 * 1.5)
    assert rep.sup_boundary == pytest.approx(2.0)
    assert rep.slack >= 0.0
    assert rep.amgm_slack >= -1e-10


def test_parabolic_check_rejects_violated_inequality():
    # a fine time grid keeps the discretization allowance small, so the
    # wrong sign of f is unmistakable
    spec = GridSpec(n=1, resolution=32)
    times = np.linspace(0.0, 0.5, 21)
    u, a, _ = _linear_member(spec, times, 2.0)
    f_big = SpaceTimeField.from_function(spec, times, lambda x, y, t: 3.0)
    with pytest.raises(ValueError, match="violated"):
        parabolic_abp_check(u, a, f_big, default_weight(2),
                            AbpConstants(c_n=1.0, delta=0.25, c2=1.0))


def test_parabolic_check_rejects_divergent_weight():
    spec = GridSpec(n=1, resolution=32)
    times = np.linspace(0.0, 0.5, 5)
    u, a, f = _linear_member(spec, times, 1.0)
    # default_weight(n) is integrable for exponent n but not n + 1
    with pytest.raises(ValueError, match="diverges"):
        parabolic_abp_check(u, a, f, default_weight(1),
                            AbpConstants(c_n=1.0, delta=0.25, c2=1.0))


def test_parabolic_calibration_covers_held_out():
    spec = GridSpec(n=1, resolution=32)
    times = np.linspace(0.0, 0.5, 6)
    members = [_linear_member(spec, times, 0.5 * 2**k) for k in range(6)]
    weight = default_weight(spec.n + 1)
    constants, split = calibrate_parabolic(members, weight)
    assert constants.c2 > 0.0
    assert constants.delta == default_delta(spec.n + 1)
    for i in split["held_out"]:
        u, a, f = members[i]
        rep = parabolic_abp_check(u, a, f, weight, constants, mode="held-out")
        assert rep.slack >= 0.0


def test_space_time_field_validation():
    spec = GridSpec(n=1, resolution=16)
    good_times = np.array([0.0, 0.5])
    vals = np.zeros((2,) + spec.shape)
    with pytest.raises(ValueError, match="increasing"):
        SpaceTimeField(spec, np.array([0.5, 0.0]), vals)
    with pytest.raises(ValueError, match="shape"):
        SpaceTimeField(spec, good_times, np.zeros((3,) + spec.shape))
    bad = vals.copy()
    bad[0, 0, 0] = np.nan
    with pytest.raises(ValueError, match="finite"):
        SpaceTimeField(spec, good_times, bad)
    with pytest.raises(ValueError):
        parabolic_alpha_check(
            flow_solve(_constant_cfg(n=1, mode="radial", resolution=33,
                                     T=0.02, dt=0.01)), -1.0)
