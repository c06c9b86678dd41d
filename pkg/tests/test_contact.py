import math

import numpy as np
import pytest

from abplab.contact import (contact_set, drift_entropy, entropy_report,
                            trudinger_functionals, weighted_det_integral)
from abplab.grid import GridField, GridSpec, unit_ball_volume
from abplab.weights import default_weight


def concave_paraboloid(spec, amp):
    return GridField(spec, amp * (1.0 - spec.radius_sq))


def test_contact_set_of_paraboloid_is_whole_interior():
    """For u = A(1 - |z|^2) every interior node beats the band sup and the
    negated Hessian is A I, so the contact set is exactly the inside mask."""
    for n in (1, 2):
        spec = GridSpec(n=n, resolution=24)
        u = concave_paraboloid(spec, 3.0)
        mask = contact_set(u)
        assert np.array_equal(mask, spec.inside_mask)


def test_convex_bump_has_empty_contact_set():
    spec = GridSpec(n=1, resolution=32)
    u = GridField(spec, spec.radius_sq - 1.0)
    assert not contact_set(u).any()


def test_entropy_report_closed_forms():
    """With contact set {r < 1-h}, mass = A^n V_n (1-h)^{2n} and entropy =
    mass * Phi(n log A): the determinant is constant so the weight factors
    out.  The comparison tolerance is the node-counting error of the
    discrete disc, which shrinks like h^{3/2}."""
    weight = default_weight(1)
    spec = GridSpec(n=1, resolution=128)
    for amp in (1.0, 4.0, 32.0):
        rep = entropy_report(concave_paraboloid(spec, amp), weight)
        rho = (1.0 - spec.h) ** 2
        mass_cf = amp * unit_ball_volume(1) * rho
        ent_cf = mass_cf * float(weight(math.log(amp)))
        assert rep.mass == pytest.approx(mass_cf, rel=1e-2)
        assert rep.entropy == pytest.approx(ent_cf, rel=1e-2)
        assert 0.0 < rep.contact_fraction <= 1.0


def test_weighted_det_integral_clamps_underflow():
    spec = GridSpec(n=1, resolution=24)
    det = np.zeros(spec.shape)
    mask = spec.inside_mask
    val = weighted_det_integral(det, default_weight(1), spec, mask)
    assert val == 0.0


def test_weighted_det_integral_without_weight_is_mass():
    spec = GridSpec(n=1, resolution=48)
    det = np.where(spec.inside_mask, 2.0, 0.0)
    mask = spec.inside_mask
    got = weighted_det_integral(det, None, spec, mask)
    assert got == pytest.approx(2.0 * math.pi * (1.0 - spec.h) ** 2, rel=1e-2)


def test_drift_entropy_matches_manual_formula():
    """Constant f = -c and a = I: the integrand is c^n Phi(log(c^n / n^n))
    over the mask."""
    n = 2
    spec = GridSpec(n=n, resolution=16)
    weight = default_weight(n)
    c = 3.0
    f = GridField(spec, np.full(spec.shape, -c))
    mask = spec.inside_mask
    val, clamped = drift_entropy(f, np.eye(n, dtype=complex), weight, mask)
    from abplab.grid import integrate_ball
    area = integrate_ball(np.ones(spec.shape), spec, mask=mask)
    manual = c**n * float(weight(math.log(c**n / n**n))) * area
    assert val == pytest.approx(manual, rel=1e-12)
    assert not clamped


def test_trudinger_functionals_on_paraboloid():
    n, amp, p = 2, 4.0, 1.5
    spec = GridSpec(n=n, resolution=32)
    u = concave_paraboloid(spec, amp)
    n_p, integral = trudinger_functionals(u, p, c1=0.0, c2=0.0)
    # N_p has constant determinant amp^n against (log^2 det + 1)^{p/2}
    rho = (1.0 - spec.h) ** (2 * n)
    det_log = n * math.log(amp)
    manual = amp**n * (det_log**2 + 1.0) ** (p / 2.0) * unit_ball_volume(n) * rho
    assert n_p == pytest.approx(manual, rel=5e-2)
    # with c1 = 0 the exponential integrand is 1 on the ball
    assert integral == pytest.approx(unit_ball_volume(n), rel=5e-2)


def test_contact_threshold_excludes_shifted_band():
    # raising the field on the band removes interior nodes from contact
    spec = GridSpec(n=1, resolution=48)
    vals = 1.0 - spec.radius_sq
    vals[spec.band_mask] += 0.5
    u = GridField(spec, vals)
    mask = contact_set(u)
    assert mask.sum() < spec.inside_mask.sum()
    assert np.all(u.values[mask] > 0.5)
