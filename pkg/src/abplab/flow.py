"""Inverse Monge-Ampère flow (-u_t) det(u_{i jbar}) = f with monitors.

Time stepping is implicit Euler: each step solves

    det(u^{k+1}_{i jbar}) * (u^k - u^{k+1}) = dt * f(., t_{k+1}),
    u^{k+1} = -b(t_{k+1}) on the boundary,

by Newton iteration.  Two geometries: the radial reduction (profile
unknowns, tridiagonal Jacobian) for radial data, and the masked
Cartesian disc for n = 1 (sparse 5-point Jacobian), where the equation
reads (-u_t) * (Laplacian u / 4) = f.  Picard iteration on the same
fixed point diverges (the u-dependence through 1/(u^k - u) amplifies by
roughly 1/dt), hence Newton.

Monitors transcribe the a priori estimates: the barrier sandwich
-b(t) + A phi_0 <= u <= -b(t), the M-band e^{+-C1 t} on -u_t with C1 a
bound on |(log f)_t|, a gradient cap, the energy inequality
E(u + b) <= E(phi_0) + (n+1) int_0^t int f, and the flow-equation
residual itself (which is what catches a frozen non-solution).
Violations are recorded, not thrown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from .abp import AbpConstants, AbpReport, default_delta
from .contact import LOG_DET_CLAMP
from .grid import GridField, GridSpec, integrate_ball
from .hessian import complex_hessian_fields, neg_hessian_spectrum_fields, _d1_field
from .radial import RadialProfile, ball_integral_radial, radial_det, radial_hessian_eigs
from .weights import Weight

__all__ = [
    "FlowConfig",
    "FlowState",
    "flow_solve",
    "frozen_flow_state",
    "FlowMonitorReport",
    "monitor_bounds",
    "EnergyReport",
    "energy_monotonicity_check",
    "AlphaReport",
    "parabolic_alpha_check",
    "SpaceTimeField",
    "parabolic_abp_check",
    "calibrate_parabolic",
]

STEP_RESIDUAL_TARGET = 1e-10
STEP_RESIDUAL_CONTRACT = 1e-6
MAX_NEWTON = 60
MAX_HALVINGS = 20


@dataclass(frozen=True)
class FlowConfig:
    """Problem data for the flow on [0, T].

    source(r, t) returns the density at radii r (radial mode) or at node
    radii (disc mode); disc mode also accepts source_xy(x, y, t) for
    non-radial data.  boundary defaults to b(t) = f(1, 0) * t, the
    schedule matching the compatibility condition b'(0) det = f(., 0) at
    the boundary (det of the initial paraboloid is 1).
    """

    n: int
    T: float
    source: Callable[[np.ndarray, float], np.ndarray]
    dt: float | None = None
    resolution: int | None = None
    mode: str | None = None
    boundary: Callable[[float], float] | None = None
    boundary_prime: Callable[[float], float] | None = None
    source_xy: Callable[[np.ndarray, np.ndarray, float], np.ndarray] | None = None
    record_every: int = 1
    grad_constant: float = 5.0

    def __post_init__(self):
        if self.T <= 0.0:
            raise ValueError("T must be positive")
        mode = self.mode or ("disc" if self.n == 1 else "radial")
        if mode not in ("radial", "disc"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "disc" and self.n != 1:
            raise ValueError("disc mode is the n = 1 geometry")
        object.__setattr__(self, "mode", mode)
        if self.dt is None:
            object.__setattr__(self, "dt", 1e-3 * self.T)
        if self.resolution is None:
            object.__setattr__(self, "resolution", 513 if mode == "radial" else 64)
        if self.boundary is None:
            f0 = float(np.asarray(self._radial_source(np.array([1.0]), 0.0))[0])
            object.__setattr__(self, "boundary", lambda t, f0=f0: f0 * t)
            object.__setattr__(self, "boundary_prime", lambda t, f0=f0: f0)
        self._validate()

    def _radial_source(self, r: np.ndarray, t: float) -> np.ndarray:
        out = np.asarray(self.source(r, t), dtype=float)
        return np.broadcast_to(out, r.shape).copy()

    def b_prime(self, t: float) -> float:
        if self.boundary_prime is not None:
            return float(self.boundary_prime(t))
        step = 1e-6 * max(self.T, 1.0)
        lo = max(t - step, 0.0)
        return (self.boundary(lo + 2 * step) - self.boundary(lo)) / (2 * step)

    def _validate(self):
        if abs(self.boundary(0.0)) > 1e-12:
            raise ValueError("boundary schedule must start at b(0) = 0")
        # compatibility b'(0) * det(initial Hessian) = f(boundary, 0); the
        # initial paraboloid has determinant exactly 1
        bp0 = self.b_prime(0.0)
        f_bdy = self._boundary_source_values(0.0)
        scale = max(1.0, abs(bp0), float(np.max(np.abs(f_bdy))))
        if float(np.max(np.abs(f_bdy - bp0))) > 1e-8 * scale:
            raise ValueError(
                f"compatibility fails: b'(0) = {bp0:.8e} but f(., 0) on the "
                f"boundary spans [{f_bdy.min():.8e}, {f_bdy.max():.8e}]")
        # source positivity, sampled over the space-time box
        for t in np.linspace(0.0, self.T, 33):
            vals = self._sample_source(t)
            if float(np.min(vals)) <= 0.0:
                raise ValueError(f"source must stay positive; min at t={t:.4f} "
                                 f"is {float(np.min(vals)):.3e}")

    def _boundary_source_values(self, t: float) -> np.ndarray:
        if self.mode == "radial" or self.source_xy is None:
            return self._radial_source(np.array([1.0]), t)
        spec = self.grid_spec()
        band = spec.band_mask
        x, y = spec.axis_views()
        vals = np.broadcast_to(np.asarray(self.source_xy(x, y, t), dtype=float),
                               spec.shape)
        return vals[band]

    def _sample_source(self, t: float) -> np.ndarray:
        if self.mode == "radial":
            return self._radial_source(self.radii(), t)
        spec = self.grid_spec()
        vals = self.source_on_geometry(t)
        return vals[spec.inside_mask | spec.band_mask]

    def source_on_geometry(self, t: float) -> np.ndarray:
        if self.mode == "radial":
            return self._radial_source(self.radii(), t)
        spec = self.grid_spec()
        if self.source_xy is not None:
            x, y = spec.axis_views()
            vals = np.asarray(self.source_xy(x, y, t), dtype=float)
            return np.broadcast_to(vals, spec.shape).copy()
        return self._radial_source(np.sqrt(spec.radius_sq), t)

    def radii(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.resolution)

    def grid_spec(self) -> GridSpec:
        return GridSpec(n=1, resolution=self.resolution)

    def steps(self) -> int:
        return max(1, round(self.T / self.dt))


@dataclass
class FlowState:
    mode: str
    n: int
    times: np.ndarray
    slices: list
    neg_ut_min: np.ndarray
    neg_ut_max: np.ndarray
    max_grad: np.ndarray
    hess_proxy_max: np.ndarray
    energy: np.ndarray
    rhs_energy: np.ndarray
    flow_residual: np.ndarray
    violations: list[str]
    config: FlowConfig

    def boundary_values(self) -> np.ndarray:
        return np.array([self.config.boundary(t) for t in self.times])


# ---------------------------------------------------------------- radial step

def _radial_residual_jac(psi, prev, r, n, rhs):
    m = psi.size
    dr = r[1] - r[0]
    w = prev - psi
    F = np.empty(m)
    diag = np.empty(m)
    lower = np.zeros(m)
    upper = np.zeros(m)

    lam0 = (psi[1] - psi[0]) / dr**2
    det0 = lam0**n
    F[0] = det0 * w[0] - rhs[0]
    ddet0 = n * lam0 ** (n - 1)
    diag[0] = -ddet0 / dr**2 * w[0] - det0
    upper[0] = ddet0 / dr**2 * w[0]

    ri = r[1:-1]
    dpsi = (psi[2:] - psi[:-2]) / (2.0 * dr)
    d2 = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / dr**2
    lam_t = dpsi / (2.0 * ri)
    lam_r = 0.25 * (d2 + dpsi / ri)
    det = lam_t ** (n - 1) * lam_r
    F[1:-1] = det * w[1:-1] - rhs[1:-1]
    dlam_t = 1.0 / (4.0 * ri * dr)
    dlr_up = 0.25 * (1.0 / dr**2 + 1.0 / (2.0 * ri * dr))
    dlr_dn = 0.25 * (1.0 / dr**2 - 1.0 / (2.0 * ri * dr))
    if n > 1:
        det_t = (n - 1) * lam_t ** (n - 2) * lam_r
    else:
        det_t = np.zeros_like(lam_t)
    det_r = lam_t ** (n - 1)
    diag[1:-1] = -det_r * 0.5 / dr**2 * w[1:-1] - det
    upper[1:-1] = (det_t * dlam_t + det_r * dlr_up) * w[1:-1]
    lower[1:-1] = (-det_t * dlam_t + det_r * dlr_dn) * w[1:-1]

    F[-1] = 0.0        # Dirichlet row handled by the caller
    diag[-1] = 1.0
    lam_min = min(float(lam0), float(np.min(lam_t)), float(np.min(lam_r)))
    return F, lower, diag, upper, lam_min, w


def _radial_step(prev: np.ndarray, r: np.ndarray, n: int, rhs: np.ndarray,
                 target: float) -> tuple[np.ndarray, float]:
    """One implicit step; returns the new profile values and the residual."""
    det_prev = np.maximum(radial_det(RadialProfile(n, prev)), 1e-12)
    psi = prev - rhs / det_prev
    psi[-1] = target
    for _ in range(MAX_NEWTON):
        F, lower, diag, upper, lam_min, w = _radial_residual_jac(psi, prev, r, n, rhs)
        F[-1] = psi[-1] - target
        rel = float(np.max(np.abs(F[:-1]) / rhs[:-1]))
        rel = max(rel, abs(F[-1]) / max(1.0, abs(target)))
        if rel <= STEP_RESIDUAL_TARGET:
            return psi, rel
        ab = np.zeros((3, psi.size))
        ab[0, 1:] = upper[:-1]
        ab[1, :] = diag
        ab[2, :-1] = lower[1:]
        delta = solve_banded((1, 1), ab, -F)
        scale_step = 1.0
        for halving in range(MAX_HALVINGS + 1):
            cand = psi + scale_step * delta
            w_c = prev[:-1] - cand[:-1]
            lam0 = (cand[1] - cand[0])
            interior_slope = cand[2:] - cand[:-2]
            if (np.all(w_c > 0.0) and lam0 > 0.0
                    and np.all(interior_slope > 0.0)):
                psi = cand
                break
            scale_step *= 0.5
        else:
            raise RuntimeError(
                "Newton step could not keep -u_t positive after "
                f"{MAX_HALVINGS} halvings")
    F, *_ = _radial_residual_jac(psi, prev, r, n, rhs)
    rel = float(np.max(np.abs(F[:-1]) / rhs[:-1]))
    if rel > STEP_RESIDUAL_CONTRACT:
        raise RuntimeError(f"inner iteration stalled at residual {rel:.3e}")
    return psi, rel


# ------------------------------------------------------------------ disc step

class _DiscGeometry:
    """Precomputed index maps for the masked Cartesian disc."""

    def __init__(self, spec: GridSpec):
        self.spec = spec
        inside = spec.inside_mask
        self.inside = inside
        self.count = int(inside.sum())
        index = -np.ones(spec.shape, dtype=int)
        index[inside] = np.arange(self.count)
        rows = [np.arange(self.count)]
        cols = [np.arange(self.count)]
        self.offdiag_pairs = []
        for axis, shift in ((0, 1), (0, -1), (1, 1), (1, -1)):
            nb = np.roll(index, -shift, axis=axis)
            ok = inside & (nb >= 0)
            self.offdiag_pairs.append((index[ok], nb[ok]))
            rows.append(index[ok])
            cols.append(nb[ok])
        self.rows = np.concatenate(rows)
        self.cols = np.concatenate(cols)

    def laplacian(self, u: np.ndarray) -> np.ndarray:
        h2 = self.spec.h**2
        lap = (np.roll(u, 1, 0) + np.roll(u, -1, 0)
               + np.roll(u, 1, 1) + np.roll(u, -1, 1) - 4.0 * u) / h2
        return lap


def _disc_step(prev: np.ndarray, geom: _DiscGeometry, rhs: np.ndarray,
               band_values: np.ndarray) -> tuple[np.ndarray, float]:
    """One implicit step on the masked disc.  Dirichlet data is imposed on
    the collar band as the initial shape shifted by the boundary motion,
    so the collar stays O(h)-consistent with the rim value and the data
    never kinks against the interior."""
    spec = geom.spec
    inside = geom.inside
    band = spec.band_mask
    h2 = spec.h**2
    u = prev.copy()
    u[band] = band_values
    det_prev = np.maximum(0.25 * geom.laplacian(prev), 1e-12)
    u[inside] = prev[inside] - rhs[inside] / det_prev[inside]
    rhs_in = rhs[inside]
    for _ in range(MAX_NEWTON):
        lap = geom.laplacian(u)
        w = prev - u
        F = 0.25 * lap[inside] * w[inside] - rhs_in
        rel = float(np.max(np.abs(F) / rhs_in))
        if rel <= STEP_RESIDUAL_TARGET:
            return u, rel
        diag = -w[inside] / h2 - 0.25 * lap[inside]
        w_rows = 0.25 * w[inside] / h2
        data = [diag]
        for pair_rows, _ in geom.offdiag_pairs:
            data.append(w_rows[pair_rows])
        jac = coo_matrix((np.concatenate(data), (geom.rows, geom.cols)),
                         shape=(geom.count, geom.count)).tocsr()
        delta = spsolve(jac, -F)
        scale_step = 1.0
        for halving in range(MAX_HALVINGS + 1):
            cand = u[inside] + scale_step * delta
            if np.all(prev[inside] - cand > 0.0):
                u[inside] = cand
                break
            scale_step *= 0.5
        else:
            raise RuntimeError(
                "Newton step could not keep -u_t positive after "
                f"{MAX_HALVINGS} halvings")
    lap = geom.laplacian(u)
    rel = float(np.max(np.abs(0.25 * lap[inside] * (prev - u)[inside] - rhs_in) / rhs_in))
    if rel > STEP_RESIDUAL_CONTRACT:
        raise RuntimeError(f"inner iteration stalled at residual {rel:.3e}")
    return u, rel


# ------------------------------------------------------------------ the solve

def grid_energy(v: GridField) -> float:
    """E(v) = int (-v) det(d dbar v) over the disc interior, for v <= 0
    with zero boundary values."""
    _, det_neg = neg_hessian_spectrum_fields(v)
    det_pos = det_neg if v.spec.n % 2 == 0 else -det_neg
    integrand = np.where(v.spec.inside_mask, -v.values * det_pos, 0.0)
    return integrate_ball(integrand, v.spec, mask=v.spec.inside_mask)


def _radial_traces(vals: np.ndarray, r: np.ndarray, n: int):
    prof = RadialProfile(n, vals)
    dv = prof.derivative()
    d2 = prof.second_derivative()
    grad = float(np.max(np.abs(dv)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(dv[1:] / r[1:])
    proxy = max(float(np.max(np.abs(d2))), float(np.max(ratio)))
    return grad, proxy


def _disc_traces(u: np.ndarray, spec: GridSpec):
    gx = _d1_field(u, 0, spec.h)
    gy = _d1_field(u, 1, spec.h)
    inside = spec.inside_mask
    grad = float(np.sqrt(np.max(np.where(inside, gx**2 + gy**2, 0.0))))
    lap = np.abs((np.roll(u, 1, 0) + np.roll(u, -1, 0) + np.roll(u, 1, 1)
                  + np.roll(u, -1, 1) - 4.0 * u) / spec.h**2)
    proxy = float(np.max(np.where(inside, lap, 0.0)))
    return grad, proxy


def flow_solve(cfg: FlowConfig) -> FlowState:
    """Run the implicit flow and record slices with monitor traces."""
    steps = cfg.steps()
    dt = cfg.T / steps
    times_all = np.arange(steps + 1) * dt
    record = sorted(set(range(0, steps + 1, cfg.record_every)) | {steps})

    violations: list[str] = []
    rec_times, slices = [], []
    tr_min, tr_max, tr_grad, tr_proxy = [], [], [], []
    tr_energy, tr_rhs, tr_resid = [], [], []
    source_integral = 0.0
    prev_source_int = None

    if cfg.mode == "radial":
        r = cfg.radii()
        current = r**2 - 1.0
        geom = None
        spec = None
    else:
        spec = cfg.grid_spec()
        geom = _DiscGeometry(spec)
        current = spec.radius_sq - 1.0
        band_base = current[spec.band_mask].copy()

    def record_slice(k: int, vals: np.ndarray, neg_ut, resid: float):
        t = times_all[k]
        b = cfg.boundary(t)
        if cfg.mode == "radial":
            prof = RadialProfile(cfg.n, vals)
            slices.append(prof)
            grad, proxy = _radial_traces(vals, r, cfg.n)
            shifted = RadialProfile(cfg.n, vals + b)
            e = ball_integral_radial(-shifted.values * radial_det(shifted), cfg.n)
            lam_t, lam_r = radial_hessian_eigs(prof)
            if min(float(np.min(lam_t)), float(np.min(lam_r))) < -1e-6:
                violations.append(f"slice at t={t:.6f} lost plurisubharmonicity")
        else:
            gf = GridField(spec, vals.copy())
            slices.append(gf)
            grad, proxy = _disc_traces(vals, spec)
            e = grid_energy(GridField(spec, vals + b))
            lap = geom.laplacian(vals)
            if float(np.min(np.where(spec.inside_mask, lap, 0.0))) < -1e-6:
                violations.append(f"slice at t={t:.6f} lost subharmonicity")
        rec_times.append(t)
        tr_grad.append(grad)
        tr_proxy.append(proxy)
        tr_energy.append(e)
        tr_rhs.append(energy0 + (cfg.n + 1) * source_integral)
        tr_resid.append(resid)
        lo, hi = float(np.min(neg_ut)), float(np.max(neg_ut))
        tr_min.append(lo)
        tr_max.append(hi)
        if lo <= 0.0:
            violations.append(f"-u_t nonpositive at t={t:.6f}")

    def source_ball_integral(t: float) -> float:
        f_vals = cfg.source_on_geometry(t)
        if cfg.mode == "radial":
            return ball_integral_radial(f_vals, cfg.n)
        return integrate_ball(f_vals, spec)

    if cfg.mode == "radial":
        shifted0 = RadialProfile(cfg.n, current)
        energy0 = ball_integral_radial(-shifted0.values * radial_det(shifted0), cfg.n)
    else:
        energy0 = grid_energy(GridField(spec, current.copy()))
    prev_source_int = source_ball_integral(0.0)
    neg_ut0 = cfg.source_on_geometry(0.0)   # det of the initial slice is 1
    if cfg.mode == "disc":
        neg_ut0 = neg_ut0[spec.inside_mask]
    record_slice(0, current, np.asarray(neg_ut0, dtype=float), 0.0)

    for k in range(1, steps + 1):
        t = times_all[k]
        f_vals = cfg.source_on_geometry(t)
        rhs = dt * f_vals
        target = -cfg.boundary(t)
        if cfg.mode == "radial":
            new, resid = _radial_step(current, r, cfg.n, rhs, target)
            neg_ut = (current - new) / dt
            neg_ut_interior = neg_ut[:-1]
        else:
            new, resid = _disc_step(current, geom, rhs, band_base + target)
            neg_ut_interior = (current - new)[spec.inside_mask] / dt
        cur_int = source_ball_integral(t)
        source_integral += 0.5 * dt * (prev_source_int + cur_int)
        prev_source_int = cur_int
        current = new
        if k in record:
            record_slice(k, current, neg_ut_interior, resid)

    return FlowState(
        mode=cfg.mode, n=cfg.n, times=np.array(rec_times), slices=slices,
        neg_ut_min=np.array(tr_min), neg_ut_max=np.array(tr_max),
        max_grad=np.array(tr_grad), hess_proxy_max=np.array(tr_proxy),
        energy=np.array(tr_energy), rhs_energy=np.array(tr_rhs),
        flow_residual=np.array(tr_resid), violations=violations, config=cfg)


def frozen_flow_state(cfg: FlowConfig) -> FlowState:
    """State with u(t) = phi_0 - b(t): the shape never moves, so the flow
    residual is |b' det(phi_0) - f|, nonzero unless f happens to equal b'.
    A monitor falsification control, not a solution."""
    steps = cfg.steps()
    dt = cfg.T / steps
    record = sorted(set(range(0, steps + 1, cfg.record_every)) | {steps})
    if cfg.mode == "radial":
        r = cfg.radii()
        base = r**2 - 1.0
    else:
        spec = cfg.grid_spec()
        base = spec.radius_sq - 1.0
        ball = spec.inside_mask | spec.band_mask

    times, slices = [], []
    tr_min, tr_max, tr_grad, tr_proxy = [], [], [], []
    tr_energy, tr_rhs, tr_resid = [], [], []
    violations: list[str] = []
    if cfg.mode == "radial":
        prof0 = RadialProfile(cfg.n, base)
        energy0 = ball_integral_radial(-base * radial_det(prof0), cfg.n)
    else:
        energy0 = grid_energy(GridField(spec, base.copy()))
    source_integral = 0.0
    prev_int = None
    for k in range(0, steps + 1):
        t = k * dt
        f_vals = cfg.source_on_geometry(t)
        if cfg.mode == "radial":
            cur_int = ball_integral_radial(f_vals, cfg.n)
        else:
            cur_int = integrate_ball(f_vals, spec)
        if prev_int is not None:
            source_integral += 0.5 * dt * (prev_int + cur_int)
        prev_int = cur_int
        if k not in record:
            continue
        vals = base - cfg.boundary(t)
        bp = cfg.b_prime(t)
        times.append(t)
        if cfg.mode == "radial":
            slices.append(RadialProfile(cfg.n, vals))
            grad, proxy = _radial_traces(vals, r, cfg.n)
            tr_energy.append(energy0)
        else:
            slices.append(GridField(spec, vals))
            grad, proxy = _disc_traces(vals, spec)
            tr_energy.append(energy0)
        tr_grad.append(grad)
        tr_proxy.append(proxy)
        tr_rhs.append(energy0 + (cfg.n + 1) * source_integral)
        # det of the frozen paraboloid shape is exactly 1; the residual
        # only means anything on the ball, not on the square's corners
        f_ball = f_vals if cfg.mode == "radial" else f_vals[ball]
        resid = float(np.max(np.abs(bp - f_ball) / f_ball))
        tr_resid.append(resid)
        tr_min.append(bp)
        tr_max.append(bp)
    return FlowState(
        mode=cfg.mode, n=cfg.n, times=np.array(times), slices=slices,
        neg_ut_min=np.array(tr_min), neg_ut_max=np.array(tr_max),
        max_grad=np.array(tr_grad), hess_proxy_max=np.array(tr_proxy),
        energy=np.array(tr_energy), rhs_energy=np.array(tr_rhs),
        flow_residual=np.array(tr_resid), violations=violations, config=cfg)


# ------------------------------------------------------------------- monitors

@dataclass(frozen=True)
class FlowMonitorReport:
    barrier_constant: float
    sandwich_low_margin: float
    sandwich_high_margin: float
    band_low_margin: float
    band_high_margin: float
    grad_max: float
    grad_threshold: float
    flow_residual_max: float
    violations: list[str]
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "barrier_constant": self.barrier_constant,
            "sandwich_low_margin": self.sandwich_low_margin,
            "sandwich_high_margin": self.sandwich_high_margin,
            "band_low_margin": self.band_low_margin,
            "band_high_margin": self.band_high_margin,
            "grad_max": self.grad_max,
            "grad_threshold": self.grad_threshold,
            "flow_residual_max": self.flow_residual_max,
            "violations": self.violations,
            "passed": self.passed,
        }


def monitor_bounds(state: FlowState, cfg: FlowConfig | None = None) -> FlowMonitorReport:
    """Check the a priori estimates on a completed run."""
    cfg = cfg or state.config
    violations = list(state.violations)
    fine_t = np.linspace(0.0, cfg.T, 501)
    bp = np.array([cfg.b_prime(t) for t in fine_t])
    if float(np.min(bp)) <= 1e-10 * max(1.0, float(np.max(np.abs(bp)))):
        violations.append("boundary schedule slope is not bounded away from zero")

    # barrier constant A: smallest with b'(t) A^n >= f(., t)
    f_over_bp = 0.0
    f0_vals = None
    logf_rate = 0.0
    dt_fd = cfg.T / 500.0
    prev_logf = None
    for t in fine_t:
        f_vals = np.asarray(cfg._sample_source(t), dtype=float)
        if f0_vals is None:
            f0_vals = f_vals
        bpt = cfg.b_prime(t)
        if bpt > 0.0:
            f_over_bp = max(f_over_bp, float(np.max(f_vals)) / bpt)
        logf = np.log(f_vals)
        if prev_logf is not None:
            logf_rate = max(logf_rate, float(np.max(np.abs(logf - prev_logf))) / dt_fd)
        prev_logf = logf
    A = f_over_bp ** (1.0 / cfg.n) if f_over_bp > 0.0 else math.inf

    # sandwich -b + A phi_0 <= u <= -b
    lo_margin = math.inf
    hi_margin = math.inf
    if cfg.mode == "radial":
        phi0 = cfg.radii() ** 2 - 1.0
    else:
        spec = cfg.grid_spec()
        phi0 = (spec.radius_sq - 1.0)
        active = spec.inside_mask | spec.band_mask
    for t, sl in zip(state.times, state.slices):
        b = cfg.boundary(t)
        vals = sl.values
        lower = -b + A * phi0
        if cfg.mode == "radial":
            lo_margin = min(lo_margin, float(np.min(vals - lower)))
            hi_margin = min(hi_margin, float(np.min(-b - vals)))
        else:
            diff_lo = np.where(active, vals - lower, np.inf)
            diff_hi = np.where(active, -b - vals, np.inf)
            lo_margin = min(lo_margin, float(np.min(diff_lo)))
            hi_margin = min(hi_margin, float(np.min(diff_hi)))
    scale = max(1.0, A, abs(cfg.boundary(cfg.T)))
    if cfg.mode == "radial":
        dx2 = (cfg.radii()[1] - cfg.radii()[0]) ** 2
    else:
        dx2 = cfg.grid_spec().h   # band imposition is O(h) on the disc
    sandwich_tol = max(1e-9, 20.0 * (dx2 + cfg.T / cfg.steps())) * scale
    if lo_margin < -sandwich_tol:
        violations.append(f"lower barrier violated by {-lo_margin:.3e}")
    if hi_margin < -sandwich_tol:
        violations.append(f"upper barrier violated by {-hi_margin:.3e}")

    # M-band on -u_t from the parabolic boundary data and |(log f)_t|
    m_hi = max(float(np.max(f0_vals)), float(np.max(bp)))
    m_lo = min(float(np.min(f0_vals)), float(np.min(bp)))
    band_low = math.inf
    band_high = math.inf
    for t, lo, hi in zip(state.times, state.neg_ut_min, state.neg_ut_max):
        band_low = min(band_low, lo - m_lo * math.exp(-logf_rate * t))
        band_high = min(band_high, m_hi * math.exp(logf_rate * t) - hi)
    band_tol = max(1e-9, 20.0 * (dx2 + cfg.T / cfg.steps())) * max(1.0, m_hi)
    if band_low < -band_tol:
        violations.append(f"-u_t fell below its barrier band by {-band_low:.3e}")
    if band_high < -band_tol:
        violations.append(f"-u_t exceeded its barrier band by {-band_high:.3e}")

    grad_baseline = state.max_grad[0]
    grad_threshold = cfg.grad_constant * (1.0 + grad_baseline)
    grad_max = float(np.max(state.max_grad))
    if grad_max > grad_threshold:
        violations.append(f"gradient {grad_max:.3e} exceeds {grad_threshold:.3e}")

    residual_max = float(np.max(state.flow_residual))
    if residual_max > STEP_RESIDUAL_CONTRACT:
        violations.append(f"flow-equation residual {residual_max:.3e} exceeds "
                          f"{STEP_RESIDUAL_CONTRACT:.0e}")

    return FlowMonitorReport(
        barrier_constant=A, sandwich_low_margin=lo_margin,
        sandwich_high_margin=hi_margin, band_low_margin=band_low,
        band_high_margin=band_high, grad_max=grad_max,
        grad_threshold=grad_threshold, flow_residual_max=residual_max,
        violations=violations, passed=not violations)


@dataclass(frozen=True)
class EnergyReport:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    min_slack: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {"min_slack": self.min_slack, "passed": self.passed}


def energy_monotonicity_check(state: FlowState, tol_scale: float = 1e-3) -> EnergyReport:
    """E(u(t) + b(t)) <= E(phi_0) + (n+1) int_0^t int_B f, at recorded times."""
    slack = state.rhs_energy - state.energy
    scale = max(1.0, float(np.max(np.abs(state.rhs_energy))))
    min_slack = float(np.min(slack))
    return EnergyReport(times=state.times, lhs=state.energy,
                        rhs=state.rhs_energy, min_slack=min_slack,
                        passed=min_slack >= -tol_scale * scale)


@dataclass(frozen=True)
class AlphaReport:
    alpha: float
    ratios: np.ndarray
    max_ratio: float

    def to_json_dict(self) -> dict:
        return {"alpha": self.alpha, "max_ratio": self.max_ratio}


def parabolic_alpha_check(state: FlowState, alpha: float) -> AlphaReport:
    """Trace of int e^{-alpha u(t)} dV / e^{alpha b(t)}, log-guarded."""
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    ratios = []
    for t, sl in zip(state.times, state.slices):
        b = state.config.boundary(t)
        vals = sl.values
        shift = float(np.max(-alpha * vals))
        if state.mode == "radial":
            integral = ball_integral_radial(np.exp(-alpha * vals - shift), state.n)
        else:
            spec = sl.spec
            mask = spec.inside_mask | spec.band_mask
            integrand = np.where(mask, np.exp(-alpha * vals - shift), 0.0)
            integral = integrate_ball(integrand, spec)
        log_ratio = shift + math.log(integral) - alpha * b
        ratios.append(math.exp(log_ratio))
    ratios = np.array(ratios)
    return AlphaReport(alpha=alpha, ratios=ratios,
                       max_ratio=float(np.max(ratios)))


# -------------------------------------------------------- parabolic sup bound

@dataclass(frozen=True)
class SpaceTimeField:
    """Values on a time-stack of one grid, shape (nt,) + grid shape."""

    spec: GridSpec
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or np.any(np.diff(times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        if values.shape != (times.size,) + self.spec.shape:
            raise ValueError(f"values shape {values.shape} does not match "
                             f"{times.size} times on grid {self.spec.shape}")
        if not np.isfinite(values).all():
            raise ValueError("values must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, spec: GridSpec, times, fn) -> "SpaceTimeField":
        times = np.asarray(times, dtype=float)
        views = spec.axis_views()
        vals = np.stack([
            np.broadcast_to(np.asarray(fn(*views, t), dtype=float),
                            spec.shape).copy()
            for t in times
        ])
        return cls(spec, times, vals)


def _parabolic_violation(u: SpaceTimeField, a_field: np.ndarray,
                         f: SpaceTimeField) -> float:
    """Worst nodewise violation of (-d_t + a^{i jbar} d_i d_jbar) u >= f."""
    spec = u.spec
    du_dt = np.gradient(u.values, u.times, axis=0)
    worst = -math.inf
    inside = spec.inside_mask
    for k in range(u.times.size):
        hess = complex_hessian_fields(GridField(spec, u.values[k]))
        contraction = np.einsum("...ij,...ij->...", a_field, hess).real
        lhs = -du_dt[k] + contraction
        gap = np.where(inside, f.values[k] - lhs, -np.inf)
        worst = max(worst, float(np.max(gap)))
    return worst


def parabolic_abp_check(u: SpaceTimeField, a: np.ndarray, f: SpaceTimeField,
                        weight: Weight, constants: AbpConstants,
                        mode: str = "fixed") -> AbpReport:
    """Space-time sup bound sup u <= sup_parabolic-boundary u + c1 + c2 N^{1/(n+1)}.

    The entropy integrates (f^-)^{n+1}/((n+1)^{n+1} det a) against the
    weight of its own log over the whole cylinder (no contact-set
    restriction in the parabolic statement); time integration is
    trapezoid over the slice integrals.  Also evaluates the chain's
    arithmetic-geometric step x + n y^{1/n} >= (n+1) (x y)^{1/(n+1)} on
    ((-u_t)_+, det(a) det(-u_{i jbar})_+) and reports its worst margin.
    """
    spec = u.spec
    n = spec.n
    if f.spec != spec or f.times.shape != u.times.shape:
        raise ValueError("u and f must live on the same space-time grid")
    if math.isinf(weight.lambda_total(n + 1)):
        raise ValueError("weight tail integral diverges for exponent n + 1")
    a_arr = np.asarray(a, dtype=complex)
    if a_arr.shape != (n, n):
        raise ValueError("parabolic checker takes a constant coefficient matrix")
    a_field = np.broadcast_to(a_arr, spec.shape + (n, n))
    det_a = float(np.linalg.det(a_arr).real)
    if det_a <= 0.0:
        raise ValueError("coefficient matrix must have positive determinant")

    dt_min = float(np.min(np.diff(u.times)))
    scale = max(1.0, float(np.max(np.abs(u.values))), float(np.max(np.abs(f.values))))
    tol = 10.0 * (spec.h**2 + dt_min) * scale
    worst = _parabolic_violation(u, a_field, f)
    if worst > tol:
        raise ValueError(f"parabolic differential inequality violated by "
                         f"{worst:.3e} (tolerance {tol:.3e})")

    f_neg = np.maximum(-f.values, 0.0)
    density = f_neg ** (n + 1) / ((n + 1) ** (n + 1) * det_a)
    mass_slices = np.empty(u.times.size)
    ent_slices = np.empty(u.times.size)
    for k in range(u.times.size):
        d = density[k]
        mass_slices[k] = integrate_ball(d, spec)
        active = d > 0.0
        logd = np.where(active, np.log(np.where(active, d, 1.0)), LOG_DET_CLAMP)
        logd = np.maximum(logd, LOG_DET_CLAMP)
        ent_slices[k] = integrate_ball(d * weight(logd), spec)
    mass = float(np.trapezoid(mass_slices, u.times))
    ent = float(np.trapezoid(ent_slices, u.times))

    inside = spec.inside_mask
    sup_cyl = float(np.max(u.values[:, inside]))
    band = spec.band_mask
    sup_par = max(float(np.max(u.values[0][inside | band])),
                  float(np.max(u.values[:, band])))

    neg_ut = np.maximum(-np.gradient(u.values, u.times, axis=0), 0.0)
    amgm = math.inf
    for k in range(u.times.size):
        _, det_neg = neg_hessian_spectrum_fields(GridField(spec, u.values[k]))
        y = det_a * np.maximum(det_neg, 0.0)
        x = neg_ut[k]
        margin = x + n * y ** (1.0 / n) - (n + 1) * (x * y) ** (1.0 / (n + 1))
        amgm = min(amgm, float(np.min(margin[inside])))

    c1 = min(constants.c_n, mass**constants.delta)
    rhs = sup_par + c1 + constants.c2 * ent ** (1.0 / (n + 1))
    return AbpReport(sup_interior=sup_cyl, sup_boundary=sup_par, mass=mass,
                     entropy=ent, c1=c1, c2=constants.c2,
                     delta=constants.delta, rhs=rhs, slack=rhs - sup_cyl,
                     mode=mode, amgm_slack=amgm)


def calibrate_parabolic(members: list[tuple[SpaceTimeField, np.ndarray, SpaceTimeField]],
                        weight: Weight,
                        delta: float | None = None) -> tuple[AbpConstants, dict]:
    """Fit (c_n, c_2) for the parabolic bound on the 70/30 fit split.

    Same rule as the elliptic calibration: c_2 makes the entropy term
    alone cover every fit member's sup excess, c_n is the largest fit
    mass^delta.
    """
    from .abp import split_indices

    if not members:
        raise ValueError("empty calibration family")
    n = members[0][0].spec.n
    if delta is None:
        delta = default_delta(n + 1)
    fit_idx, held_idx = split_indices(len(members))
    probe = AbpConstants(c_n=0.0, delta=delta, c2=0.0)
    c_n = 0.0
    c2 = 0.0
    for i in fit_idx:
        u, a, f = members[i]
        rep = parabolic_abp_check(u, a, f, weight, probe, mode="calibration")
        gap = rep.sup_interior - rep.sup_boundary
        c_n = max(c_n, rep.mass**delta)
        if gap > 0.0:
            if rep.entropy <= 0.0:
                raise ValueError(f"member {i} has positive sup excess with "
                                 "zero entropy")
            c2 = max(c2, gap / rep.entropy ** (1.0 / (n + 1)))
    return AbpConstants(c_n=c_n, delta=delta, c2=c2), {"fit": fit_idx,
                                                       "held_out": held_idx}
