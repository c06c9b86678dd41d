"""Gradient-estimate experiment on the flat torus [0,1)^{2n}.

A potential phi deforms the flat metric to g = I + phi_{i jbar}; the
normalized volume ratio is F = log det(g) - kappa with kappa chosen so
that the mean of e^F is one.  The monitored quantity is
H = e^{-lambda phi} |grad phi|^2 in the reference metric (holomorphic
convention, so |grad phi|^2 = sum |phi_{z_i}|^2 = |grad_R phi|^2 / 4),
together with the differential inequality it satisfies,

    Lap_phi H >= 2 e^{-lambda phi} <grad F, grad phi>
                 + (lambda - 2B) H tr_{g} I - lambda (n + 2) H,

where Lap_phi contracts g^{-1} with the complex Hessian.  On the flat
torus the curvature bounds are A = B = 0 and lambda defaults to 1.

Coordinates: axis i is x_i and axis n + i is y_i for z_i = x_i + i y_i.
All stencils are periodic (np.roll).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "PeriodicSpec",
    "TorusPair",
    "make_pair",
    "GradientReport",
    "gradient_report",
    "ModeShape",
    "single_mode_shape",
    "two_mode_shape",
    "random_band_shape",
    "positivity_threshold",
    "sweep_family",
]


@dataclass(frozen=True)
class PeriodicSpec:
    """Uniform periodic grid on [0,1)^{2n}."""

    n: int
    resolution: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.resolution < 8:
            raise ValueError("resolution below 8 cannot resolve a mode")

    @property
    def h(self) -> float:
        return 1.0 / self.resolution

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.resolution,) * (2 * self.n)

    def node_coords(self) -> list[np.ndarray]:
        axis = np.arange(self.resolution) / self.resolution
        return list(np.meshgrid(*([axis] * (2 * self.n)), indexing="ij",
                                sparse=True))

    def mean(self, values: np.ndarray) -> float:
        """Integral over the unit-volume torus."""
        return float(np.mean(values))


def _pd1(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(u, -1, axis) - np.roll(u, 1, axis)) / (2.0 * h)


def _pd2(u: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(u, -1, axis) - 2.0 * u + np.roll(u, 1, axis)) / h**2


def _pmixed(u: np.ndarray, ax1: int, ax2: int, h: float) -> np.ndarray:
    up = np.roll(u, -1, ax1) - np.roll(u, 1, ax1)
    return (np.roll(up, -1, ax2) - np.roll(up, 1, ax2)) / (4.0 * h**2)


def periodic_complex_hessian(u: np.ndarray, spec: PeriodicSpec) -> np.ndarray:
    """Nodewise matrix u_{z_i zbar_j}, shape grid + (n, n), Hermitian."""
    n, h = spec.n, spec.h
    out = np.zeros(spec.shape + (n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            if i == j:
                dxx = _pd2(u, i, h)
                dyy = _pd2(u, n + i, h)
                out[..., i, i] = 0.25 * (dxx + dyy)
            else:
                dxx = _pmixed(u, i, j, h)
                dyy = _pmixed(u, n + i, n + j, h)
                dxy = _pmixed(u, i, n + j, h)
                dyx = _pmixed(u, n + i, j, h)
                val = 0.25 * (dxx + dyy) + 0.25j * (dxy - dyx)
                out[..., i, j] = val
                out[..., j, i] = np.conj(val)
    return out


def periodic_gradient_sq(u: np.ndarray, spec: PeriodicSpec) -> np.ndarray:
    """sum_i |u_{z_i}|^2 = |grad_R u|^2 / 4, nodewise."""
    total = np.zeros(spec.shape)
    for axis in range(2 * spec.n):
        total += _pd1(u, axis, spec.h) ** 2
    return 0.25 * total


def _metric_eigs(g: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return g[..., 0, 0].real[..., None]
    return np.linalg.eigvalsh(g)


def _metric_det(g: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return g[..., 0, 0].real
    if n == 2:
        return (g[..., 0, 0].real * g[..., 1, 1].real
                - np.abs(g[..., 0, 1]) ** 2)
    return np.linalg.det(g).real


def _metric_inverse(g: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return (1.0 / g[..., 0, 0].real)[..., None, None].astype(complex)
    if n == 2:
        det = _metric_det(g, 2)
        inv = np.empty_like(g)
        inv[..., 0, 0] = g[..., 1, 1] / det
        inv[..., 1, 1] = g[..., 0, 0] / det
        inv[..., 0, 1] = -g[..., 0, 1] / det
        inv[..., 1, 0] = -g[..., 1, 0] / det
        return inv
    return np.linalg.inv(g)


@dataclass(frozen=True)
class TorusPair:
    """Potential with its normalized volume-ratio field F.

    metric holds I + phi_{i jbar} nodewise; kappa is the additive
    normalization making the mean of e^F equal to one.
    """

    spec: PeriodicSpec
    phi: np.ndarray
    F: np.ndarray
    kappa: float
    metric: np.ndarray

    def volume_defect(self) -> float:
        return abs(self.spec.mean(np.exp(self.F)) - 1.0)


def make_pair(spec: PeriodicSpec, phi: np.ndarray) -> TorusPair:
    phi = np.asarray(phi, dtype=float)
    if phi.shape != spec.shape:
        raise ValueError(f"potential shape {phi.shape} does not match grid "
                         f"{spec.shape}")
    if not np.isfinite(phi).all():
        raise ValueError("potential must be finite")
    g = np.eye(spec.n) + periodic_complex_hessian(phi, spec)
    lam_min = _metric_eigs(g, spec.n).min(axis=-1)
    worst = float(lam_min.min())
    if worst <= 0.0:
        node = np.unravel_index(int(np.argmin(lam_min)), spec.shape)
        raise ValueError(
            f"deformed metric not positive: eigenvalue {worst:.6e} at node "
            f"{tuple(int(c) for c in node)}")
    f_raw = np.log(_metric_det(g, spec.n))
    kappa = math.log(spec.mean(np.exp(f_raw)))
    pair = TorusPair(spec=spec, phi=phi, F=f_raw - kappa, kappa=kappa, metric=g)
    if pair.volume_defect() > 1e-8:
        raise ValueError(f"volume normalization defect {pair.volume_defect():.3e}")
    return pair


@dataclass(frozen=True)
class GradientReport:
    lambda_: float
    curvature_a: float
    curvature_b: float
    c2: float
    p: float
    q: float
    h_max: float
    h_l1: float
    entropy_f: float
    ef_lq: float
    ratio: float
    lemma_margin: float
    lemma_scale: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "lambda": self.lambda_,
            "curvature_a": self.curvature_a,
            "curvature_b": self.curvature_b,
            "c2": self.c2,
            "p": self.p,
            "q": self.q,
            "H_max": self.h_max,
            "H_L1": self.h_l1,
            "entropy_F": self.entropy_f,
            "eF_Lq": self.ef_lq,
            "ratio": self.ratio,
            "lemma_margin": self.lemma_margin,
            "lemma_scale": self.lemma_scale,
            "passed": self.passed,
        }


def gradient_report(pair: TorusPair, lambda_: float | None = None,
                    c2: float | None = None, p: float | None = None,
                    q: float | None = None,
                    margin_factor: float = 50.0) -> GradientReport:
    """Evaluate the gradient-estimate functionals and the discrete lemma.

    p must exceed n and q must exceed 1 for the entropy and the L^q norm
    to control the estimate; both are validated.  c2 defaults to
    lambda, the exponent the sup-bound barrier produces on the flat
    torus.  The lemma margin is the worst nodewise excess of Lap_phi H
    over its lower bound; it is allowed to dip O(h^2) below zero.
    """
    spec = pair.spec
    n = spec.n
    curvature_a = 0.0
    curvature_b = 0.0
    if lambda_ is None:
        lambda_ = max(2.0 * curvature_b + 100.0 * curvature_a, 1.0)
    if lambda_ <= 0.0:
        raise ValueError("lambda must be positive")
    if p is None:
        p = float(n + 1)
    if q is None:
        q = 2.0
    if p <= n:
        raise ValueError(f"entropy exponent p must exceed n = {n}")
    if q <= 1.0:
        raise ValueError("integrability exponent q must exceed 1")
    if c2 is None:
        c2 = lambda_

    phi, F = pair.phi, pair.F
    grad_phi_sq = periodic_gradient_sq(phi, spec)
    grad_f_sq = periodic_gradient_sq(F, spec)
    h_field = np.exp(-lambda_ * phi) * grad_phi_sq

    grad_f = np.sqrt(grad_f_sq)
    entropy_f = spec.mean(grad_f**n * np.log(grad_f + 1.0) ** p * np.exp(F))
    ef_lq = spec.mean(np.exp(q * F)) ** (1.0 / q)
    ratio = float(np.max(grad_phi_sq * np.exp(-c2 * (phi - phi.min()))))

    g_inv = _metric_inverse(pair.metric, n)
    hess_h = periodic_complex_hessian(h_field, spec)
    lap_h = np.einsum("...ij,...ji->...", g_inv, hess_h).real
    # <grad F, grad phi> = Re sum F_{z_i} conj(phi_{z_i}) = grad_R dot / 4
    dot = np.zeros(spec.shape)
    for axis in range(2 * n):
        dot += _pd1(F, axis, spec.h) * _pd1(phi, axis, spec.h)
    dot *= 0.25
    trace = np.einsum("...ii->...", g_inv).real
    rhs = (2.0 * np.exp(-lambda_ * phi) * dot
           + (lambda_ - 2.0 * curvature_b) * h_field * trace
           - lambda_ * (n + 2) * h_field)
    diff = lap_h - rhs
    lemma_margin = float(np.min(diff))
    lemma_scale = max(1.0, float(np.max(np.abs(lap_h))), float(np.max(np.abs(rhs))))
    passed = lemma_margin >= -margin_factor * spec.h**2 * lemma_scale
    return GradientReport(
        lambda_=lambda_, curvature_a=curvature_a, curvature_b=curvature_b,
        c2=c2, p=p, q=q, h_max=float(np.max(h_field)),
        h_l1=spec.mean(h_field), entropy_f=entropy_f, ef_lq=ef_lq,
        ratio=ratio, lemma_margin=lemma_margin, lemma_scale=lemma_scale,
        passed=passed)


# ------------------------------------------------------------------- families

@dataclass(frozen=True)
class ModeShape:
    """Trigonometric polynomial sum_j a_j cos(2 pi k_j . xi + theta_j)."""

    modes: tuple[tuple[float, tuple[int, ...], float], ...]

    def evaluate(self, spec: PeriodicSpec) -> np.ndarray:
        coords = spec.node_coords()
        out = np.zeros(spec.shape)
        for amplitude, k, phase in self.modes:
            if len(k) != 2 * spec.n:
                raise ValueError(f"mode vector {k} has wrong dimension")
            arg = np.zeros(spec.shape)
            for ki, xi in zip(k, coords):
                if ki:
                    arg = arg + ki * xi
            out += amplitude * np.cos(2.0 * math.pi * arg + phase)
        return out

    @cached_property
    def max_frequency(self) -> int:
        return max(max(abs(ki) for ki in k) for _, k, _ in self.modes)


def single_mode_shape(n: int) -> ModeShape:
    k = tuple([1] + [0] * (2 * n - 1))
    return ModeShape(modes=((1.0, k, 0.0),))


def two_mode_shape(n: int) -> ModeShape:
    k1 = tuple([1] + [0] * (2 * n - 1))
    k2 = [0] * (2 * n)
    k2[n] = 1          # first y direction
    k2[0] = 1
    return ModeShape(modes=((1.0, k1, 0.0), (0.7, tuple(k2), 1.0)))


def random_band_shape(n: int, seed: int = 0, num_modes: int = 8,
                      max_freq: int = 2) -> ModeShape:
    rng = np.random.default_rng(seed)
    modes = []
    while len(modes) < num_modes:
        k = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1,
                                               size=2 * n))
        if all(v == 0 for v in k):
            continue
        amplitude = float(rng.normal()) / num_modes
        phase = float(rng.uniform(0.0, 2.0 * math.pi))
        modes.append((amplitude, k, phase))
    return ModeShape(modes=tuple(modes))


def positivity_threshold(shape: ModeShape, spec: PeriodicSpec) -> float:
    """Largest amplitude keeping I + eps * Hess(shape) positive: the
    reciprocal of the worst negative eigenvalue of the shape Hessian."""
    hess = periodic_complex_hessian(shape.evaluate(spec), spec)
    lam_min = float(_metric_eigs(np.zeros((spec.n, spec.n)) + hess,
                                 spec.n).min())
    if lam_min >= 0.0:
        return math.inf
    return -1.0 / lam_min


def sweep_family(shape: ModeShape, spec: PeriodicSpec, count: int = 5,
                 fraction: float = 0.9) -> list[tuple[float, TorusPair]]:
    """Pairs at amplitudes filling (0, fraction * threshold]."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must sit strictly inside (0, 1)")
    top = positivity_threshold(shape, spec)
    if math.isinf(top):
        top = 1.0
    base = shape.evaluate(spec)
    out = []
    for eps in np.linspace(fraction * top / count, fraction * top, count):
        out.append((float(eps), make_pair(spec, eps * base)))
    return out
