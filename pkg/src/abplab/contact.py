"""Contact sets and determinant entropies.

The refined bound only sees the contact set

    Gamma^- = { x : -complex_hessian(u)(x) > 0,  u(x) > sup_boundary(u) },

and integrates det(-u_{i jbar}) against Phi(log det(-u_{i jbar})) over
it.  Everything here consumes the vectorized spectrum fields from the
hessian module; the pointwise operators serve as their oracle in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridField, field_scale, integrate_ball, sup_boundary
from .hessian import neg_hessian_spectrum_fields
from .weights import Weight

__all__ = [
    "ContactReport",
    "contact_set",
    "entropy_report",
    "drift_entropy",
    "trudinger_functionals",
    "LOG_DET_CLAMP",
]

# exp(-745) is the smallest positive double that still round-trips;
# log det is clamped here before any weight evaluation.
LOG_DET_CLAMP = -745.0


def default_eps_pd(u: GridField) -> float:
    """Positive-definiteness margin: strict positivity is not detectable
    on a grid, so 'positive' means 'larger than 1e-8 times the field scale'."""
    return 1e-8 * field_scale(u)


def contact_set(u: GridField, eps_pd: float | None = None,
                threshold: float | None = None) -> np.ndarray:
    """Mask of nodes with min eig(-u_{i jbar}) > eps_pd and u > sup_boundary(u)."""
    if eps_pd is None:
        eps_pd = default_eps_pd(u)
    if eps_pd < 0.0:
        raise ValueError("eps_pd must be nonnegative")
    if threshold is None:
        threshold = sup_boundary(u)
    lam_min, _ = neg_hessian_spectrum_fields(u)
    with np.errstate(invalid="ignore"):
        mask = (lam_min > eps_pd) & (u.values > threshold)
    return mask & u.spec.inside_mask


@dataclass(frozen=True)
class ContactReport:
    mask: np.ndarray
    mass: float
    entropy: float
    contact_fraction: float
    threshold: float

    def to_json_dict(self) -> dict:
        return {
            "mass": self.mass,
            "entropy": self.entropy,
            "contact_fraction": self.contact_fraction,
            "threshold": self.threshold,
        }


def weighted_det_integral(det: np.ndarray, weight: Weight | None,
                          spec, mask: np.ndarray) -> float:
    """integral over the mask of det * Phi(log det), with the underflow clamp."""
    safe_det = np.where(mask, det, 1.0)
    if weight is None:
        integrand = safe_det
    else:
        with np.errstate(divide="ignore"):      # log(0) -> -inf, clamped next
            log_det = np.log(np.maximum(safe_det, 0.0))
        log_det = np.maximum(log_det, LOG_DET_CLAMP)
        integrand = safe_det * weight(log_det)
    return integrate_ball(integrand, spec, mask=mask)


def entropy_report(u: GridField, weight: Weight,
                   eps_pd: float | None = None) -> ContactReport:
    """Mass and entropy N_Phi of u over its contact set."""
    threshold = sup_boundary(u)
    mask = contact_set(u, eps_pd=eps_pd, threshold=threshold)
    _, det = neg_hessian_spectrum_fields(u)
    inside_count = int(u.spec.inside_mask.sum())
    if not mask.any():
        return ContactReport(mask, 0.0, 0.0, 0.0, threshold)
    mass = weighted_det_integral(det, None, u.spec, mask)
    ent = weighted_det_integral(det, weight, u.spec, mask)
    return ContactReport(mask, mass, ent, float(mask.sum()) / inside_count, threshold)


def _det_a_field(a: np.ndarray, spec) -> np.ndarray:
    """det of a Hermitian coefficient field; accepts a constant (n, n)
    matrix or a full per-node array of shape grid_shape + (n, n)."""
    a = np.asarray(a)
    if a.shape == (spec.n, spec.n):
        return np.full(spec.shape, float(np.linalg.det(a).real))
    if a.shape != spec.shape + (spec.n, spec.n):
        raise ValueError(f"coefficient field has shape {a.shape}")
    return np.linalg.det(a).real


def drift_entropy(f: GridField, a: np.ndarray, weight: Weight | None,
                  mask: np.ndarray) -> tuple[float, bool]:
    """Entropy of the drift corollary over a mask:

        int (f^-)^n / det(a) * Phi(log((f^-)^n / (n^n det(a)))) dV,

    with f^- = max(-f, 0).  Nodes with f^- = 0 contribute zero even where
    det(a) vanishes; a vanishing det(a) under f^- > 0 makes the integral
    +inf, reported with a degeneracy flag instead of an exception.
    """
    spec = f.spec
    n = spec.n
    det_a = _det_a_field(a, spec)
    if np.any(det_a[mask] < 0.0):
        raise ValueError("coefficient field must be positive semidefinite on the mask")
    f_neg = np.maximum(-f.values, 0.0)
    degenerate = bool(np.any((det_a <= 0.0) & (f_neg > 0.0) & mask))
    if degenerate:
        return math.inf, True
    active = mask & (f_neg > 0.0)
    if not active.any():
        return 0.0, False
    base = np.where(active, f_neg**n / np.where(active, det_a, 1.0), 0.0)
    if weight is None:
        integrand = base
    else:
        ratio = np.where(active, base / float(n) ** n, 1.0)
        log_ratio = np.maximum(np.log(np.maximum(ratio, 0.0)), LOG_DET_CLAMP)
        integrand = base * weight(log_ratio)
    return integrate_ball(integrand, spec, mask=active), False


def trudinger_functionals(u: GridField, p: float, c1: float, c2: float,
                          eps_pd: float | None = None) -> tuple[float, float]:
    """(N_p, exponential integral) of the borderline-weight corollary.

    N_p integrates det(-u_{i jbar}) (log^2 det + 1)^{p/2} over the contact
    set; the second value is

        int_{B_1} exp{ c1 ((u - c2)_+ / N_p^{1/n})^{n/(n-p)} } dV.

    The boundary sup of u must vanish up to the O(h) band bias.
    """
    spec = u.spec
    n = spec.n
    if not 0.0 < p < n:
        raise ValueError(f"need 0 < p < n, got p={p}, n={n}")
    bias = 10.0 * spec.h * field_scale(u)
    if sup_boundary(u) > bias:
        raise ValueError("boundary sup must be <= 0 (up to the band bias)")
    mask = contact_set(u, eps_pd=eps_pd)
    _, det = neg_hessian_spectrum_fields(u)
    safe_det = np.where(mask, det, 1.0)
    log_det = np.maximum(np.log(np.maximum(safe_det, 0.0)), LOG_DET_CLAMP)
    n_p = integrate_ball(safe_det * (log_det**2 + 1.0) ** (p / 2.0), spec, mask=mask)
    if n_p <= 0.0:
        if float(np.max(u.values)) <= c2:
            return 0.0, integrate_ball(np.ones(spec.shape), spec)
        raise ValueError("N_p = 0 while u exceeds c2 somewhere")
    exponent = c1 * ((np.maximum(u.values - c2, 0.0) / n_p ** (1.0 / n))
                     ** (n / (n - p)))
    return n_p, integrate_ball(np.exp(exponent), spec)
