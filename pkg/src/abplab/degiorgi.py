"""De Giorgi iteration bound and the level-set curves feeding it.

The lemma: if phi is nonincreasing and t phi(s+t) <= C0 phi(s)^{1+delta}
for all s >= s0, t > 0, then phi vanishes at

    s_inf = 2 C0 phi(s0)^delta / (1 - 2^{-delta}) + s0.

s_infinity evaluates that formula exactly; verify_hypothesis checks the
premise exhaustively on sampled data; level_machinery produces the
curves phi(s) = int_{v > s} F and A_s = int_{v > s} (v - s) F that play
the roles of phi and C0 phi^{1+delta} in the sup-bound proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridField, integrate_ball, sup_boundary, sup_interior

__all__ = [
    "DeGiorgiInput",
    "s_infinity",
    "HypothesisReport",
    "verify_hypothesis",
    "LevelCurves",
    "level_machinery",
]

S_GRID_SIZE = 256


@dataclass(frozen=True)
class DeGiorgiInput:
    c0: float
    delta: float
    s0: float
    phi_s0: float
    s_samples: np.ndarray | None = field(default=None)
    phi_samples: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if not np.isfinite([self.c0, self.delta, self.s0, self.phi_s0]).all():
            raise ValueError("all parameters must be finite")
        if self.c0 <= 0.0:
            raise ValueError("C0 must be positive")
        if self.phi_s0 < 0.0:
            raise ValueError("phi(s0) must be nonnegative")
        if (self.s_samples is None) != (self.phi_samples is None):
            raise ValueError("sampled phi needs both s and phi arrays")
        if self.phi_samples is not None:
            phi = np.asarray(self.phi_samples, dtype=float)
            if np.any(np.diff(phi) > 1e-12 * max(1.0, float(phi[0]))):
                raise ValueError("sampled phi must be nonincreasing")


def s_infinity(inp: DeGiorgiInput) -> float:
    """Vanishing level 2 C0 phi(s0)^delta / (1 - 2^{-delta}) + s0."""
    if inp.delta <= 0.0:
        raise ValueError("delta must be positive")
    return 2.0 * inp.c0 * inp.phi_s0**inp.delta / (1.0 - 2.0**-inp.delta) + inp.s0


@dataclass(frozen=True)
class HypothesisReport:
    holds: bool
    worst_margin: float
    worst_pair: tuple[float, float]   # (s, t) attaining the worst margin


def verify_hypothesis(s: np.ndarray, phi: np.ndarray, c0: float,
                      delta: float, s0: float | None = None) -> HypothesisReport:
    """Exhaustive check of t phi(s+t) <= C0 phi(s)^{1+delta} on sample pairs.

    Pairs are (s_i, t = s_j - s_i) for i < j with s_i >= s0, so s + t
    lands back on the sample grid and no interpolation enters.
    """
    s = np.asarray(s, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if s.shape != phi.shape or s.ndim != 1 or s.size < 2:
        raise ValueError("need matching 1-d sample arrays with >= 2 points")
    if np.any(np.diff(s) <= 0.0):
        raise ValueError("s samples must be strictly increasing")
    start = 0 if s0 is None else int(np.searchsorted(s, s0))
    t = s[None, :] - s[:, None]                      # t[i, j] = s_j - s_i
    bound = c0 * phi[:, None] ** (1.0 + delta)
    margin = np.where(t > 0.0, bound - t * phi[None, :], np.inf)
    margin = margin[start:, :]
    flat = int(np.argmin(margin))
    i, j = np.unravel_index(flat, margin.shape)
    worst = float(margin[i, j])
    pair = (float(s[start + i]), float(s[j] - s[start + i]))
    return HypothesisReport(holds=worst >= 0.0, worst_margin=worst,
                            worst_pair=pair)


@dataclass(frozen=True)
class LevelCurves:
    s: np.ndarray
    phi: np.ndarray
    a: np.ndarray

    def chain_margin(self) -> float:
        """min over grid pairs of A_s - t phi(s+t), nonnegative up to O(h^2)."""
        return _chain_report(self.s, self.phi, self.a)

    def rows(self):
        return zip(self.s, self.phi, self.a)


def _chain_report(s: np.ndarray, phi: np.ndarray, a: np.ndarray) -> float:
    t = s[None, :] - s[:, None]
    margin = np.where(t > 0.0, a[:, None] - t * phi[None, :], np.inf)
    return float(np.min(margin))


def level_machinery(v: GridField, F: GridField, s_grid: np.ndarray | None = None) -> LevelCurves:
    """Curves phi(s) = int_{v > s} F dV and A_s = int_{v > s} (v - s) F dV."""
    if v.spec != F.spec:
        raise ValueError("v and F must share a grid")
    scale = max(1.0, float(np.max(np.abs(F.values))))
    if float(np.min(F.values)) < -1e-12 * scale:
        raise ValueError("F must be nonnegative")
    if s_grid is None:
        lo = max(0.0, sup_boundary(v))
        hi = sup_interior(v)
        if hi <= lo:
            hi = lo + 1.0
        s_grid = np.linspace(lo, hi, S_GRID_SIZE)
    s_grid = np.asarray(s_grid, dtype=float)
    f_vals = np.maximum(F.values, 0.0)
    phi = np.empty_like(s_grid)
    a = np.empty_like(s_grid)
    for k, s in enumerate(s_grid):
        mask = v.values > s
        phi[k] = integrate_ball(f_vals, v.spec, mask=mask)
        a[k] = integrate_ball((v.values - s) * f_vals, v.spec, mask=mask)
    return LevelCurves(s=s_grid, phi=phi, a=a)
