"""Entropy weights Phi and their tail integrals.

A weight is a positive nondecreasing function t -> Phi(t).  The refined
bound consumes the tail integral

    I(s) = int_s^inf Phi(t)^{-1/n} dt,      Lambda = I(0),

which is finite exactly when Phi grows fast enough for the dimension at
hand.  The named presets carry closed-form tails; anything else falls
back to adaptive quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

__all__ = ["Weight", "power_weight", "exp_weight", "log_power_weight", "default_weight"]

_MONOTONE_SAMPLES = np.concatenate(
    [np.linspace(-20.0, 20.0, 401), np.geomspace(20.0, 2.0e4, 50)]
)


@dataclass(frozen=True)
class Weight:
    """Positive nondecreasing weight with an optional analytic tail."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    # analytic I(s) = int_s^inf fn(t)^{-1/n} dt; returns math.inf when the
    # tail diverges for that dimension.
    analytic_tail: Callable[[float, int], float] | None = field(default=None)

    def __post_init__(self) -> None:
        # overflow to +inf is fine for the monotonicity probe, and the
        # inf - inf = nan it produces in the differences compares as ok
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(self.fn(_MONOTONE_SAMPLES), dtype=float)
            if not np.all(vals > 0.0):
                raise ValueError(f"weight {self.name} is not strictly positive")
            if np.any(np.diff(vals) < -1e-12 * np.maximum(vals[:-1], 1.0)):
                raise ValueError(f"weight {self.name} is not nondecreasing")

    def __call__(self, t: np.ndarray | float) -> np.ndarray | float:
        return self.fn(t)

    def tail_integral(self, s: float, n: int) -> float:
        """I(s) = int_s^inf Phi(t)^{-1/n} dt, possibly +inf."""
        if self.analytic_tail is not None:
            return self.analytic_tail(s, n)
        integrand = lambda t: float(self.fn(t)) ** (-1.0 / n)
        # Convergence probe: the integral over [s, inf) is finite iff the
        # dyadic block integrals shrink geometrically.
        block, lo = 0.0, max(s, 1.0)
        prev = None
        for k in range(40):
            hi = lo * 2.0
            val, _ = quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)
            if prev is not None and val > 0.9 * prev:
                return math.inf
            block += val
            if val < 1e-14:
                break
            prev, lo = val, hi
        else:
            return math.inf
        head, _ = quad(integrand, s, max(s, 1.0), epsabs=1e-14, epsrel=1e-12, limit=200)
        return head + block

    def lambda_total(self, n: int) -> float:
        """Lambda = I(0); +inf for weights too slow for dimension n."""
        return self.tail_integral(0.0, n)

    def is_integrable(self, n: int) -> bool:
        return math.isfinite(self.lambda_total(n))


def power_weight(k: float) -> Weight:
    """Phi(t) = (1 + t_+)^k; integrable tail iff k > n."""

    def fn(t):
        return (1.0 + np.maximum(t, 0.0)) ** k

    def tail(s: float, n: int) -> float:
        a = k / n
        if a <= 1.0:
            return math.inf
        at_zero = 1.0 / (a - 1.0)
        if s >= 0.0:
            return (1.0 + s) ** (1.0 - a) / (a - 1.0)
        return at_zero - s  # Phi = 1 on t < 0

    return Weight(fn, name=f"power({k:g})", analytic_tail=tail)


def exp_weight(k: float) -> Weight:
    """Phi(t) = e^{k t}; always integrable, I(s) = (n/k) e^{-k s / n}."""

    def fn(t):
        return np.exp(k * np.asarray(t, dtype=float))

    def tail(s: float, n: int) -> float:
        return (n / k) * math.exp(-k * s / n)

    return Weight(fn, name=f"exp({k:g})", analytic_tail=tail)


def log_power_weight(p: float, n: int) -> Weight:
    """Phi(t) = (e + t_+)^n * log^p(e + t_+), built for dimension n.

    Then Phi^{-1/n} = 1 / ((e + t) log^{p/n}(e + t)) on t >= 0, and the
    substitution w = log(e + t) gives the closed-form tail

        I(s) = log(e + s)^{1 - p/n} / (p/n - 1)   for s >= 0,

    finite exactly when p > n.
    """

    def fn(t):
        base = np.e + np.maximum(np.asarray(t, dtype=float), 0.0)
        return base**n * np.log(base) ** p

    def tail(s: float, n_eval: int) -> float:
        a = p / n_eval
        if n_eval != n or a <= 1.0:
            return math.inf if a <= 1.0 else Weight(fn).tail_integral(s, n_eval)
        w = math.log(math.e + max(s, 0.0))
        val = w ** (1.0 - a) / (a - 1.0)
        if s < 0.0:
            val += -s * float(fn(0.0)) ** (-1.0 / n_eval)
        return val

    return Weight(fn, name=f"log-power({p:g},n={n})", analytic_tail=tail)


def default_weight(n: int) -> Weight:
    """The experiments' default Phi(t) = (1 + t_+)^{n+1}: minimal integrable
    growth for dimension n, stressing the sharp regime."""
    return power_weight(n + 1)
