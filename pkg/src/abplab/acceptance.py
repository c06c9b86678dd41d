"""The numbered acceptance criteria, runnable as a suite.

Each criterion is a self-contained callable taking only a seed.  It
builds its own data, states its tolerance next to the check, and returns
a CriterionResult whose detail line carries the measured numbers.  No
criterion writes files except the determinism probe, which works inside
temporary directories it removes afterwards; report emission for the
others belongs to the command-line layer.

Wall-clock seconds are attached to the result for the printed line but
excluded from the JSON form, so emitted summaries stay byte-identical
across runs.
"""

from __future__ import annotations

import filecmp
import itertools
import math
import shutil
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .abp import abp_check, calibrate_constants, paraboloid_family
from .contact import entropy_report
from .degiorgi import DeGiorgiInput, level_machinery, s_infinity, verify_hypothesis
from .flow import (FlowConfig, SpaceTimeField, calibrate_parabolic,
                   energy_monotonicity_check, flow_solve, frozen_flow_state,
                   monitor_bounds, parabolic_abp_check, parabolic_alpha_check)
from .grid import (GridField, GridSpec, integrate_ball, sup_interior,
                   unit_ball_volume)
from .hessian import complex_hessian_at, real_hessian_at
from .ma_radial import (build_h, comparison_check, kolodziej_probe,
                        log_singularity_family, solve_dirichlet_radial,
                        solver_residual)
from .radial import RadialProfile, ball_integral_radial
from .torus import (PeriodicSpec, gradient_report, positivity_threshold,
                    random_band_shape, single_mode_shape, sweep_family,
                    two_mode_shape)
from .weights import default_weight

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "run_acceptance"]


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} criterion {self.number:2d} [{self.name}] "
                f"{self.detail} ({self.seconds:.1f}s)")

    def to_json_dict(self) -> dict:
        return {"number": self.number, "name": self.name,
                "passed": self.passed, "detail": self.detail}


# --------------------------------------------------------------- polynomials


class _Polynomial:
    """Multivariate polynomial with exact partial derivatives, the
    symbolic oracle for the finite-difference operators."""

    def __init__(self, terms: dict[tuple[int, ...], float]):
        self.terms = {e: c for e, c in terms.items() if c != 0.0}

    def at(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[0])
        for exps, c in self.terms.items():
            term = np.full(pts.shape[0], c)
            for k, e in enumerate(exps):
                if e:
                    term = term * pts[:, k] ** e
            out += term
        return out

    def diff(self, axis: int) -> "_Polynomial":
        new = {}
        for exps, c in self.terms.items():
            if exps[axis] == 0:
                continue
            lowered = list(exps)
            lowered[axis] -= 1
            new[tuple(lowered)] = new.get(tuple(lowered), 0.0) + c * exps[axis]
        return _Polynomial(new)

    def d2(self, a: int, b: int) -> "_Polynomial":
        return self.diff(a).diff(b)

    def as_callable(self):
        return lambda *coords: self.at(np.stack(np.broadcast_arrays(*coords),
                                                axis=-1).reshape(-1, len(coords)))


def _random_polynomial(rng: np.random.Generator, dims: int,
                       degree: int = 4) -> _Polynomial:
    terms = {}
    for exps in itertools.product(range(degree + 1), repeat=dims):
        if sum(exps) <= degree:
            terms[exps] = float(rng.uniform(-1.0, 1.0))
    return _Polynomial(terms)


def _exact_complex_hessian(poly: _Polynomial, pts: np.ndarray) -> np.ndarray:
    n = pts.shape[1] // 2
    out = np.empty((pts.shape[0], n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            xi, yi = 2 * i, 2 * i + 1
            xj, yj = 2 * j, 2 * j + 1
            re = poly.d2(xi, xj).at(pts) + poly.d2(yi, yj).at(pts)
            im = poly.d2(xi, yj).at(pts) - poly.d2(yi, xj).at(pts)
            out[:, i, j] = 0.25 * (re + 1j * im)
    return out


def _exact_real_hessian(poly: _Polynomial, pts: np.ndarray) -> np.ndarray:
    d = pts.shape[1]
    out = np.empty((pts.shape[0], d, d))
    for a in range(d):
        for b in range(a, d):
            vals = poly.d2(a, b).at(pts)
            out[:, a, b] = vals
            out[:, b, a] = vals
    return out


# ---------------------------------------------------------------- criterion 1


def _criterion_hessian_convergence(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng([seed, 1])
    poly = _random_polynomial(rng, dims=4, degree=4)
    fn = poly.as_callable()
    pts = rng.uniform(-0.6, 0.6, size=(40, 4))
    exact_c = _exact_complex_hessian(poly, pts)
    exact_r = _exact_real_hessian(poly, pts)
    errs_c, errs_r = [], []
    for res in (64, 128):
        h = 2.0 / (res - 8)
        errs_c.append(float(np.max(np.abs(complex_hessian_at(fn, pts, h) - exact_c))))
        errs_r.append(float(np.max(np.abs(real_hessian_at(fn, pts, h) - exact_r))))
    ratio = math.log(2.0 / (64 - 8)) - math.log(2.0 / (128 - 8))
    order_c = math.log(errs_c[0] / errs_c[1]) / ratio
    order_r = math.log(errs_r[0] / errs_r[1]) / ratio
    ok = order_c >= 1.7 and order_r >= 1.7
    return ok, (f"orders complex {order_c:.2f} real {order_r:.2f} "
                f"(need >= 1.7); errors at res 128: "
                f"{errs_c[1]:.2e} / {errs_r[1]:.2e}")


# ---------------------------------------------------------------- criterion 2


def _criterion_ball_quadrature(seed: int) -> tuple[bool, str]:
    del seed
    cases = [(1, 128, math.pi, 1e-2), (2, 64, math.pi**2 / 2.0, 2e-2)]
    rels = []
    ok = True
    for n, res, exact, tol in cases:
        spec = GridSpec(n=n, resolution=res)
        val = integrate_ball(np.ones(spec.shape), spec)
        rel = abs(val - exact) / exact
        rels.append(rel)
        ok = ok and rel <= tol
    return ok, (f"unit-ball volume errors: n=1 {rels[0]:.2e} (tol 1e-2), "
                f"n=2 {rels[1]:.2e} (tol 2e-2)")


# ---------------------------------------------------------------- criterion 3


def _criterion_paraboloid_abp(seed: int) -> tuple[bool, str]:
    del seed
    amplitudes = [float(2**j) for j in range(11)]
    worst_rel = 0.0
    min_held_slack = math.inf
    for n, res in ((1, 256), (2, 48)):
        spec = GridSpec(n=n, resolution=res)
        weight = default_weight(n)
        family = paraboloid_family(spec, amplitudes)
        # the discrete contact set is the full inside region, so the
        # closed forms carry the (1 - h) cutoff of the inside mask
        rho2n = (1.0 - spec.h) ** (2 * n)
        for amp, u in zip(amplitudes, family):
            rep = entropy_report(u, weight)
            mass_cf = amp**n * unit_ball_volume(n) * rho2n
            ent_cf = mass_cf * float(weight(np.array(n * math.log(amp))))
            for measured, closed in ((rep.mass, mass_cf), (rep.entropy, ent_cf),
                                     (sup_interior(u), amp)):
                worst_rel = max(worst_rel, abs(measured - closed) / closed)
        constants, split = calibrate_constants(family, weight)
        for i in split["held_out"]:
            rep = abp_check(family[i], weight, constants, mode="held-out")
            min_held_slack = min(min_held_slack, rep.slack)
    ok = worst_rel <= 2e-2 and min_held_slack >= 0.0
    return ok, (f"worst closed-form error {worst_rel:.2e} (tol 2e-2), "
                f"min held-out slack {min_held_slack:.3e} (need >= 0)")


# ---------------------------------------------------------------- criterion 4


def _nsd_test_function(rng: np.random.Generator, d: int):
    b = rng.normal(size=(d, d))
    m = b @ b.T / d + 0.1 * np.eye(d)
    center = rng.uniform(-0.3, 0.3, size=d)
    dirs = rng.normal(size=(3, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    betas = rng.uniform(0.0, 0.5, size=3)

    def fn(*coords):
        x = np.stack(np.broadcast_arrays(*coords), axis=-1) - center
        quad = -0.5 * np.einsum("...i,ij,...j->...", x, m, x)
        quart = sum(beta * (x @ a) ** 4 for beta, a in zip(betas, dirs))
        return quad - quart

    return fn


def _criterion_determinant_domination(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng([seed, 4])
    worst = math.inf
    total = 0
    h = 2.0 / (64 - 8)
    for n in (1, 2):
        d = 2 * n
        for _ in range(10):
            fn = _nsd_test_function(rng, d)
            pts = rng.uniform(-0.6, 0.6, size=(1000, d))
            hc = complex_hessian_at(fn, pts, h)
            hr = real_hessian_at(fn, pts, h)
            det_neg_c = np.linalg.det(-hc).real
            det_r = np.linalg.det(hr)
            lhs = 4.0**n * det_neg_c**2
            scale = (1.0 + np.max(np.abs(hr), axis=(1, 2))) ** (2 * n)
            margin = (lhs - np.abs(det_r)) / (100.0 * h**2 * scale)
            worst = min(worst, float(np.min(margin)))
            total += pts.shape[0]
    ok = worst >= -1.0
    return ok, (f"{total} nodes, worst normalized margin {worst:.3f} "
                f"(need >= -1, units of 100 h^2 scale)")


# ---------------------------------------------------------------- criterion 5


def _criterion_radial_solver(seed: int) -> tuple[bool, str]:
    del seed
    worst_const = 0.0
    for n in (1, 2):
        g = RadialProfile.from_function(n, lambda r: np.full_like(r, 2.0), 1025)
        psi = solve_dirichlet_radial(g)
        exact = 2.0 ** (1.0 / n) * (psi.radii**2 - 1.0)
        worst_const = max(worst_const, float(np.max(np.abs(psi.values - exact))))

    # nonconstant density with a closed-form solution psi = (r^2 - 1) + (r^4 - 1)/4
    def exact_psi(r):
        return (r**2 - 1.0) + 0.25 * (r**4 - 1.0)

    densities = {
        1: lambda r: 1.0 + r**2,
        2: lambda r: (1.0 + 0.5 * r**2) * (1.0 + r**2),
    }
    min_order = math.inf
    worst_resid = 0.0
    for n, dens in densities.items():
        errs = []
        for size in (257, 513, 1025):
            g = RadialProfile.from_function(n, dens, size)
            psi = solve_dirichlet_radial(g)
            errs.append(float(np.max(np.abs(psi.values - exact_psi(psi.radii)))))
            if size == 1025:
                worst_resid = max(worst_resid, solver_residual(psi, g.values))
        min_order = min(min_order,
                        math.log2(errs[0] / errs[1]),
                        math.log2(errs[1] / errs[2]))
    ok = worst_const <= 1e-6 and worst_resid <= 5e-3 and min_order >= 1.5
    return ok, (f"constant-density error {worst_const:.2e} (tol 1e-6), "
                f"residual {worst_resid:.2e} (tol 5e-3), "
                f"order {min_order:.2f} (need >= 1.5)")


# ---------------------------------------------------------------- criterion 6


def _criterion_comparison_dichotomy(seed: int) -> tuple[bool, str]:
    del seed
    n = 1
    weight = default_weight(n)
    profiles = [(0.5, -1.0, 0.0), (1.0, -2.0, 0.5), (0.0, 0.8, -0.3),
                (-0.5, 1.5, 0.0), (1.2, 0.0, -1.0)]
    worst_margin = math.inf
    all_ok = True
    for a, b, c in profiles:
        g = RadialProfile.from_function(
            n, lambda r: a + b * r**2 + c * r**4, 2049)
        density = RadialProfile(n=n, values=np.exp(g.values))
        psi1 = solve_dirichlet_radial(density)
        entropy = ball_integral_radial(np.exp(g.values) * weight(g.values), n)
        transform = build_h(weight, entropy, q=1.0, alpha=1.0, n=n)
        rep = comparison_check(g, psi1, transform, weight)
        worst_margin = min(worst_margin, rep.worst_margin)
        all_ok = all_ok and rep.passed and rep.dichotomy_ok
    return all_ok, (f"5 profiles, worst margin {worst_margin:.3e} "
                    f"(pass within each report's O(h^2) tolerance)")


# ---------------------------------------------------------------- criterion 7


def _criterion_kolodziej_threshold(seed: int) -> tuple[bool, str]:
    del seed
    family = log_singularity_family([0.2, 0.1, 0.05, 0.025])
    alphas = (np.arange(2, 28) * 0.05 * math.pi).tolist()
    table = kolodziej_probe(family, alphas)
    if table.alpha_star is None:
        return False, "no convergent alpha found"
    rel = abs(table.alpha_star - math.pi) / math.pi
    return rel <= 0.10, (f"alpha_star {table.alpha_star:.4f} vs pi, "
                         f"relative gap {rel:.3f} (tol 0.10)")


# ---------------------------------------------------------------- criterion 8


def _criterion_degiorgi(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng([seed, 8])
    # closed-form values on dyadic rationals are exact in floating point
    exact_cases = [
        (DeGiorgiInput(c0=3.0, delta=1.0, s0=0.5, phi_s0=2.0), 24.5),
        (DeGiorgiInput(c0=3.0, delta=2.0, s0=0.25, phi_s0=4.0), 128.25),
        (DeGiorgiInput(c0=0.5, delta=1.0, s0=0.0, phi_s0=1.0), 2.0),
    ]
    exact_ok = all(s_infinity(inp) == want for inp, want in exact_cases)

    vanished = 0
    for _ in range(100):
        s_top = float(rng.uniform(0.5, 3.0))
        delta = float(rng.uniform(0.3, 1.5))
        amp = float(rng.uniform(0.5, 4.0))
        s = np.linspace(0.0, 1.5 * s_top, 257)
        phi = amp * np.clip(1.0 - s / s_top, 0.0, None) ** (2.0 / delta)
        pos = phi > 0.0
        t = s[None, :] - s[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            need = np.where((t > 0.0) & pos[:, None],
                            t * phi[None, :] / phi[:, None] ** (1.0 + delta),
                            0.0)
        c0 = 1.1 * float(np.max(need))
        if not verify_hypothesis(s, phi, c0, delta).holds:
            continue
        s_inf = s_infinity(DeGiorgiInput(c0=c0, delta=delta, s0=0.0, phi_s0=amp))
        if s_top <= s_inf:
            vanished += 1

    spec = GridSpec(n=1, resolution=128)
    v = GridField.from_function(spec, lambda x, y: 1.0 - x**2 - y**2)
    f_one = GridField(spec, np.ones(spec.shape))
    curves = level_machinery(v, f_one)
    margin = curves.chain_margin()
    a_exact = 0.5 * math.pi * (1.0 - curves.s) ** 2
    a_err = float(np.max(np.abs(curves.a - a_exact)))
    ok = exact_ok and vanished == 100 and margin >= -1e-3 and a_err <= 1e-2
    return ok, (f"exact formula {'ok' if exact_ok else 'BROKEN'}, "
                f"{vanished}/100 families vanish by s_inf, "
                f"chain margin {margin:.2e} (tol -1e-3), "
                f"excess-mass error {a_err:.2e} (tol 1e-2)")


# ---------------------------------------------------------------- criterion 9


def _criterion_flow(seed: int) -> tuple[bool, str]:
    del seed
    t_final = 0.5
    cfg = FlowConfig(n=2, T=t_final,
                     source=lambda r, t: np.ones_like(r),
                     resolution=513, record_every=20)
    state = flow_solve(cfg)
    phi0 = cfg.radii() ** 2 - 1.0
    linf = max(float(np.max(np.abs(sl.values - (phi0 - t))))
               for t, sl in zip(state.times, state.slices))
    monitor = monitor_bounds(state)
    energy = energy_monotonicity_check(state)

    stalled = FlowConfig(
        n=2, T=t_final, source=lambda r, t: np.ones_like(r), resolution=257,
        dt=t_final / 100.0,
        boundary=lambda t: (t_final / 40.0) * (1.0 - math.exp(-40.0 * t / t_final)),
        boundary_prime=lambda t: math.exp(-40.0 * t / t_final),
        record_every=10)
    slope_rep = monitor_bounds(frozen_flow_state(stalled))
    slope_caught = any("slope" in v for v in slope_rep.violations)

    frozen_cfg = FlowConfig(n=2, T=t_final,
                            source=lambda r, t: 1.0 + 0.5 * (1.0 - r**2),
                            resolution=257, dt=t_final / 100.0, record_every=10)
    frozen_rep = monitor_bounds(frozen_flow_state(frozen_cfg))
    frozen_caught = any("residual" in v for v in frozen_rep.violations)

    ok = (linf <= 1e-4 and monitor.passed and energy.passed
          and slope_caught and frozen_caught)
    return ok, (f"L_inf vs exact {linf:.2e} (tol 1e-4), monitors "
                f"{'pass' if monitor.passed else monitor.violations}, "
                f"energy slack {energy.min_slack:.2e}, stalled-schedule "
                f"{'caught' if slope_caught else 'MISSED'}, frozen-shape "
                f"{'caught' if frozen_caught else 'MISSED'}")


# --------------------------------------------------------------- criterion 10


def _q0_flow_config(n: int, t_final: float, q0: float, beta: float,
                    resolution: int) -> FlowConfig:
    power = n / (n + 1.0)

    def source(r, t):
        return q0 * (1.0 - r**2) + beta * (1.0 + (n + 1) * q0 * t) ** power

    return FlowConfig(n=n, T=t_final, source=source, resolution=resolution,
                      boundary=lambda t: beta * t,
                      boundary_prime=lambda t: beta,
                      record_every=20)


def _criterion_parabolic_ratio(seed: int) -> tuple[bool, str]:
    del seed
    cfg = _q0_flow_config(n=2, t_final=0.5, q0=0.6, beta=1.0, resolution=257)
    state = flow_solve(cfg)
    rep = parabolic_alpha_check(state, alpha=1.0)
    spread = float(np.max(rep.ratios) / np.min(rep.ratios))
    return spread <= 3.0, (f"alpha=1 ratio spread {spread:.3f} over the run "
                           f"(need <= 3)")


# --------------------------------------------------------------- criterion 11


def _criterion_parabolic_abp(seed: int) -> tuple[bool, str]:
    del seed
    n = 1
    spec = GridSpec(n=n, resolution=64)
    times = np.linspace(0.0, 0.5, 11)
    # the parabolic entropy is an (n+1)-dimensional object, so the weight
    # must have an integrable tail one dimension up
    weight = default_weight(n + 1)
    eye = np.eye(n, dtype=complex)
    members = []
    for k in range(10):
        amp = 0.5 * 2.0 ** (k / 2.0)

        def u_fn(x, y, t, amp=amp):
            return amp * (1.0 + t) * (1.0 - x**2 - y**2)

        def f_fn(x, y, t, amp=amp):
            return -amp * (1.0 - x**2 - y**2) - amp * (1.0 + t)

        members.append((SpaceTimeField.from_function(spec, times, u_fn), eye,
                        SpaceTimeField.from_function(spec, times, f_fn)))
    constants, split = calibrate_parabolic(members, weight)
    min_slack = math.inf
    min_amgm = math.inf
    for i in split["held_out"]:
        u, a, f = members[i]
        rep = parabolic_abp_check(u, a, f, weight, constants, mode="held-out")
        min_slack = min(min_slack, rep.slack)
        min_amgm = min(min_amgm, rep.amgm_slack)
    scale = max(abs(m[0].values).max() for m in members)
    amgm_tol = 50.0 * spec.h**2 * scale
    ok = min_slack >= 0.0 and min_amgm >= -amgm_tol
    return ok, (f"min held-out slack {min_slack:.3e} (need >= 0), "
                f"AM-GM margin {min_amgm:.2e} (tol -{amgm_tol:.1e})")


# --------------------------------------------------------------- criterion 12

# declared budgets for the swept families below; fixed numbers, not fits
# declared caps for the default shape families at the acceptance
# resolution (measured 5.48 and 1.19); a refactor that inflates the
# gradient-entropy functionals past these is a regression
TORUS_ENTROPY_F_BUDGET = 8.0
TORUS_EF_LQ_BUDGET = 1.5


def _criterion_torus(seed: int) -> tuple[bool, str]:
    spec = PeriodicSpec(n=1, resolution=64)
    shapes = [single_mode_shape(1), two_mode_shape(1),
              random_band_shape(1, seed=seed)]
    worst_defect = 0.0
    worst_lemma = math.inf
    worst_held_excess = -math.inf
    budget_ok = True
    for shape in shapes:
        family = sweep_family(shape, spec, count=5)
        reports = [gradient_report(pair) for _, pair in family]
        for (_, pair), rep in zip(family, reports):
            worst_defect = max(worst_defect, pair.volume_defect())
            worst_lemma = min(worst_lemma,
                              rep.lemma_margin / (spec.h**2 * rep.lemma_scale))
            if not rep.passed:
                return False, f"lemma margin failed at {rep.lemma_margin:.3e}"
            budget_ok = budget_ok and (rep.entropy_f <= TORUS_ENTROPY_F_BUDGET
                                       and rep.ef_lq <= TORUS_EF_LQ_BUDGET)
        # per-shape calibration of the sup constant on the 70/30 split
        fit = [0, 1, 2, 4]
        held = [3]
        c1 = max(reports[i].ratio for i in fit)
        for i in held:
            worst_held_excess = max(worst_held_excess, reports[i].ratio - c1)

    # n = 2 smoke sweep
    spec2 = PeriodicSpec(n=2, resolution=16)
    for _, pair in sweep_family(single_mode_shape(2), spec2, count=3):
        rep = gradient_report(pair)
        worst_defect = max(worst_defect, pair.volume_defect())
        if not rep.passed:
            return False, f"n=2 lemma margin failed at {rep.lemma_margin:.3e}"

    # integral of H stable under refinement at fixed amplitude
    amp = 0.5 * positivity_threshold(single_mode_shape(1), spec)
    h_l1 = []
    for res in (32, 64):
        sp = PeriodicSpec(n=1, resolution=res)
        from .torus import make_pair
        pair = make_pair(sp, amp * single_mode_shape(1).evaluate(sp))
        h_l1.append(gradient_report(pair).h_l1)
    refine_rel = abs(h_l1[1] - h_l1[0]) / abs(h_l1[1])

    ok = (worst_defect <= 1e-12 and worst_held_excess <= 0.0
          and budget_ok and refine_rel <= 2e-2)
    return ok, (f"volume defect {worst_defect:.1e} (tol 1e-12), lemma margin "
                f"{worst_lemma:.2f} h^2 units, held-out ratio excess "
                f"{worst_held_excess:.3e} (need <= 0), budgets "
                f"{'ok' if budget_ok else 'EXCEEDED'}, refinement drift "
                f"{refine_rel:.2e} (tol 2e-2)")


# --------------------------------------------------------------- criterion 13


def _tree_digest(root: Path) -> list[tuple[str, int]]:
    files = sorted(p for p in root.rglob("*") if p.is_file())
    return [(str(p.relative_to(root)), p.stat().st_size) for p in files]


def _criterion_determinism(seed: int) -> tuple[bool, str]:
    from .cli import run_default_suite

    dirs = [Path(tempfile.mkdtemp(prefix="abplab-det-")) for _ in range(2)]
    try:
        for d in dirs:
            run_default_suite(d, seed=seed)
        digests = [_tree_digest(d) for d in dirs]
        names_match = [n for n, _ in digests[0]] == [n for n, _ in digests[1]]
        identical = names_match
        if names_match:
            for (rel, _), _ in zip(digests[0], digests[1]):
                if not filecmp.cmp(dirs[0] / rel, dirs[1] / rel, shallow=False):
                    identical = False
                    break
        count = len(digests[0])
    finally:
        for d in dirs:
            shutil.rmtree(d, ignore_errors=True)
    return identical, (f"{count} report files byte-identical across two runs"
                       if identical else "report trees differ between runs")


# -------------------------------------------------------------------- runner

CRITERIA: list[tuple[int, str]] = [
    (1, "hessian-convergence"),
    (2, "ball-quadrature"),
    (3, "paraboloid-abp"),
    (4, "determinant-domination"),
    (5, "radial-solver"),
    (6, "comparison-dichotomy"),
    (7, "kolodziej-threshold"),
    (8, "degiorgi-iteration"),
    (9, "flow-oracle-and-controls"),
    (10, "parabolic-ratio"),
    (11, "parabolic-abp"),
    (12, "torus-gradient"),
    (13, "suite-determinism"),
]

_IMPLEMENTATIONS = {
    1: _criterion_hessian_convergence,
    2: _criterion_ball_quadrature,
    3: _criterion_paraboloid_abp,
    4: _criterion_determinant_domination,
    5: _criterion_radial_solver,
    6: _criterion_comparison_dichotomy,
    7: _criterion_kolodziej_threshold,
    8: _criterion_degiorgi,
    9: _criterion_flow,
    10: _criterion_parabolic_ratio,
    11: _criterion_parabolic_abp,
    12: _criterion_torus,
    13: _criterion_determinism,
}


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    name = dict(CRITERIA)[number]
    start = time.perf_counter()
    try:
        passed, detail = _IMPLEMENTATIONS[number](seed)
    except Exception as exc:  # a crash is a failure, not an abort
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number=number, name=name, passed=passed,
                           detail=detail, seconds=time.perf_counter() - start)


def run_acceptance(seed: int = 0, numbers: list[int] | None = None,
                   jobs: int = 1) -> list[CriterionResult]:
    """Run the requested criteria (all by default), in order."""
    todo = numbers if numbers is not None else [num for num, _ in CRITERIA]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda k: run_criterion(k, seed), todo))
    else:
        results = [run_criterion(k, seed) for k in todo]
    return results
