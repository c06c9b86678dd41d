import numpy as np
import pytest

from abplab.inequalities import fit_remainder_constant, scalar_inequality_suite


def test_suite_margins_are_nonnegative():
    report = scalar_inequality_suite(samples=100_000, seed=3)
    assert set(report) == {"young_splitting", "power_sum", "log_product",
                           "exp_remainder_n1", "exp_remainder_n2"}
    for name, entry in report.items():
        # the fitted remainder constants saturate at one sample point, so
        # their margin is zero there up to rounding
        scale = abs(entry.get("fitted_constant", 1.0))
        assert entry["worst_margin"] >= -1e-9 * scale, name
        assert entry["samples"] == 100_000


def test_suite_rejects_thin_sampling():
    with pytest.raises(ValueError):
        scalar_inequality_suite(samples=10_000)


def test_fitted_constant_is_deterministic():
    a = fit_remainder_constant(1, samples=100_000, seed=0)
    b = fit_remainder_constant(1, samples=100_000, seed=0)
    assert a == b
    assert a > 0.0


def test_fitted_constant_saturates_on_its_own_sample():
    """the fit leaves exactly one sample point with zero slack"""
    from abplab.inequalities import _remainder_margins

    c1 = fit_remainder_constant(1, samples=100_000, seed=0)
    margins = _remainder_margins(np.random.default_rng(0), 100_000, 1, c1)
    assert margins.min() >= -1e-9 * c1
    assert margins.min() <= 1e-6 * c1


def test_remainder_constant_grows_with_tighter_exponent():
    # n = 1 makes exp(2 x^{1/n}) the weakest control, so its constant
    # dominates the n = 2 one on the same box
    c1 = fit_remainder_constant(1, samples=100_000, seed=0)
    c2 = fit_remainder_constant(2, samples=100_000, seed=0)
    assert c1 > c2


def test_log_product_inequality_by_hand():
    # one deterministic spot check away from the sampler
    x, y = 3.0, 0.2
    assert np.log1p(x) + np.log1p(y) >= np.log1p(x * y)
