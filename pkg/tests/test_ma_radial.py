import math

import numpy as np
import pytest

from abplab.ma_radial import (HTransform, build_h, comparison_check, energy,
                              kolodziej_probe, log_singularity_family,
                              ma_mass, solve_dirichlet_radial, solver_residual)
from abplab.radial import RadialProfile, ball_integral_radial, radial_det
from abplab.weights import default_weight, exp_weight, power_weight


def test_constant_density_recovers_paraboloid():
    """det of A(r^2 - 1) is A^n, so the solver inverts that exactly up to
    quadrature error in the moment integral."""
    for n, amp in ((1, 2.0), (2, 3.0)):
        g = RadialProfile.from_function(n, lambda r, a=amp: a**n + 0.0 * r, 2049)
        psi = solve_dirichlet_radial(g)
        expected = amp * (g.radii**2 - 1.0)
        assert np.max(np.abs(psi.values - expected)) < 1e-10
        assert solver_residual(psi, g.values) < 1e-8


def test_polynomial_density_small_residual():
    g = RadialProfile.from_function(2, lambda r: 2.0 + r**2, 4097)
    psi = solve_dirichlet_radial(g)
    assert psi.boundary_value == 0.0
    assert solver_residual(psi, g.values) < 5e-3


def test_solver_input_validation():
    g = RadialProfile.from_function(1, lambda r: r**2 - 0.5, 257)
    with pytest.raises(ValueError):
        solve_dirichlet_radial(g)
    ok = RadialProfile.from_function(1, lambda r: 1.0 + 0.0 * r, 257)
    with pytest.raises(ValueError):
        solve_dirichlet_radial(ok, n=2)


def test_ma_mass_of_paraboloid():
    psi = RadialProfile.from_function(2, lambda r: 3.0 * (r**2 - 1.0), 2049)
    assert ma_mass(psi) == pytest.approx(9.0 * math.pi**2 / 2.0, rel=1e-6)


def test_h_transform_shape():
    # the n=2 table needs a weight whose tail decays fast enough to truncate
    w = exp_weight(1.0)
    t = build_h(w, entropy=4.0, q=1.0, alpha=0.5, n=2)
    assert t.value(0.0) == pytest.approx(-t.s0)
    # h is nondecreasing and concave along the table
    vals = t.value(t.s_nodes)
    assert np.all(np.diff(vals) >= -1e-12 * t.s0)
    slopes = np.diff(vals) / np.diff(t.s_nodes)
    assert np.all(np.diff(slopes) <= 1e-9 * t.prefactor)
    # s0 <= (q/alpha) N^{1/n} lambda(n)
    assert t.s0 <= t.prefactor * w.lambda_total(2) * (1.0 + 1e-8)


def test_h_prime_matches_value_table():
    # value() interpolates the table, so the finite difference only sees
    # the closed-form slope up to the table's resolution
    t = build_h(default_weight(1), entropy=2.0, q=1.0, alpha=1.0, n=1)
    for s in (0.5, 2.0, 7.0):
        step = 1e-5 * (1.0 + s)
        fd = (t.value(s + step) - t.value(s - step)) / (2.0 * step)
        assert fd == pytest.approx(t.prime(s), rel=5e-3)


def test_h_requires_integrable_weight():
    # power k = n gives lambda_total(n) = inf
    with pytest.raises(ValueError, match="diverges"):
        build_h(power_weight(1), entropy=1.0, q=1.0, alpha=1.0, n=1)
    with pytest.raises(ValueError):
        build_h(default_weight(1), entropy=-1.0, q=1.0, alpha=1.0, n=1)


def _comparison_setup(n, fn, samples=2049):
    weight = default_weight(n)
    g = RadialProfile.from_function(n, fn, samples)
    density = RadialProfile(n=n, values=np.exp(g.values))
    psi1 = solve_dirichlet_radial(density)
    entropy = ball_integral_radial(np.exp(g.values) * weight(g.values), n)
    transform = build_h(weight, entropy, q=1.0, alpha=1.0, n=n)
    return g, psi1, transform, weight


def test_comparison_holds_on_smooth_data():
    g, psi1, transform, weight = _comparison_setup(
        1, lambda r: 0.5 - 0.75 * r**2)
    rep = comparison_check(g, psi1, transform, weight)
    assert rep.passed
    assert rep.dichotomy_ok
    assert rep.worst_margin >= -rep.tolerance


def test_comparison_zero_control_fails():
    """dropping the auxiliary potential must break the pointwise bound
    whenever e^G exceeds the exp(w) cap somewhere"""
    g, psi1, transform, weight = _comparison_setup(
        1, lambda r: 1.5 - 0.5 * r**2)
    rep = comparison_check(g, psi1, transform, weight, zero_h=True)
    assert not rep.passed


def test_comparison_rejects_mismatched_entropy():
    g, psi1, transform, weight = _comparison_setup(
        1, lambda r: 0.25 - 0.25 * r**2)
    wrong = HTransform(weight=transform.weight, n=transform.n,
                       entropy=2.0 * transform.entropy, q=transform.q,
                       alpha=transform.alpha, s_nodes=transform.s_nodes,
                       h_values=transform.h_values)
    with pytest.raises(ValueError, match="entropy"):
        comparison_check(g, psi1, wrong, weight)


def test_energy_of_paraboloid():
    """E(A(r^2-1)) = A^{n+1} int (1-r^2) dV; n=1, A=2 gives 4 * pi/2."""
    psi = RadialProfile.from_function(1, lambda r: 2.0 * (r**2 - 1.0), 4097)
    assert energy(psi) == pytest.approx(2.0 * math.pi, rel=1e-6)


def test_log_family_unit_mass():
    family = log_singularity_family([0.2, 0.1, 0.05])
    assert [p for p, _ in family] == [0.2, 0.1, 0.05]
    for _, psi in family:
        assert ma_mass(psi) == pytest.approx(1.0, rel=2e-3)
        assert psi.boundary_value == pytest.approx(0.0, abs=1e-12)


def test_probe_needs_three_members():
    family = log_singularity_family([0.2, 0.1])
    with pytest.raises(ValueError, match="three"):
        kolodziej_probe(family, [1.0, 2.0])


def test_probe_rejects_heavy_mass():
    family = log_singularity_family([0.2, 0.1, 0.05])
    heavy = [(p, RadialProfile(n=psi.n, values=2.0 * psi.values))
             for p, psi in family]
    with pytest.raises(ValueError, match="mass"):
        kolodziej_probe(heavy, [1.0])


def test_probe_threshold_near_pi():
    family = log_singularity_family([0.2, 0.1, 0.05, 0.025], num_samples=2049)
    alphas = (np.arange(2, 28) * 0.05 * math.pi).tolist()
    table = kolodziej_probe(family, alphas)
    assert table.alpha_star is not None
    assert abs(table.alpha_star - math.pi) / math.pi <= 0.10
    # every integral at a bounded alpha is finite and positive
    for p, val in table.integrals(table.alpha_star):
        assert math.isfinite(val) and val > 0.0


def test_radial_det_of_log_member_is_concentrated():
    """the regularized log potential carries nearly all mass near r = eps"""
    (eps, psi), = log_singularity_family([0.1])
    det = radial_det(psi)
    inner = psi.radii <= 3.0 * eps
    total = ball_integral_radial(det, psi.n)
    near = ball_integral_radial(np.where(inner, det, 0.0), psi.n)
    assert near / total > 0.85
