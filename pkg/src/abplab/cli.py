"""Command-line driver.

Every subcommand reads an optional JSON config, runs one experiment,
emits its reports plus a manifest into the output directory, and exits
with a four-way code:

    0  ran and every declared check passed
    1  ran to completion but a declared check failed
    2  config error (unreadable file, unknown keys, bad values)
    3  the computation itself failed (solver stall, degenerate data)

Unknown config keys are rejected rather than ignored, so a typo cannot
silently fall back to a default.  The ABPLAB_OUT environment variable
overrides --out when set.  Identical config and seed produce
byte-identical output trees; nothing here writes timestamps.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .abp import (AbpConstants, TrudingerConstants, abp_check, abp_drift_check,
                  calibrate_constants, calibrate_trudinger, default_delta,
                  dirichlet_l_infinity_check, paraboloid_family, split_indices,
                  trudinger_check)
from .degiorgi import level_machinery
from .flow import (FlowConfig, SpaceTimeField, calibrate_parabolic,
                   energy_monotonicity_check, flow_solve, frozen_flow_state,
                   monitor_bounds, parabolic_abp_check, parabolic_alpha_check)
from .grid import GridField, GridSpec
from .ma_radial import (kolodziej_probe, log_singularity_family, ma_mass,
                        solve_dirichlet_radial, solver_residual)
from .radial import RadialProfile
from .report import RunManifest, config_hash, emit, write_csv, write_json
from .torus import (gradient_report, PeriodicSpec, random_band_shape,
                    single_mode_shape, sweep_family, two_mode_shape)
from .weights import Weight, default_weight, exp_weight, log_power_weight, power_weight

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    pass


# ------------------------------------------------------------- config loading


def _merge_config(defaults: dict, path: str | None, overrides: dict) -> dict:
    cfg = json.loads(json.dumps(defaults))  # deep copy, keeps it JSON-able
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = sorted(set(loaded) - set(defaults))
        if unknown:
            raise ConfigError(f"unknown config keys: {unknown}")
        cfg.update(loaded)
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    return cfg


def _take_keys(spec: dict, allowed: set[str], what: str) -> None:
    if not isinstance(spec, dict):
        raise ConfigError(f"{what} must be a JSON object")
    unknown = sorted(set(spec) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {what}: {unknown}")


def _weight_from(spec: dict | None, n: int) -> Weight:
    if spec is None:
        return default_weight(n)
    kind = spec.get("kind")
    try:
        if kind == "default":
            _take_keys(spec, {"kind"}, "weight")
            return default_weight(n)
        if kind == "power":
            _take_keys(spec, {"kind", "k"}, "weight")
            return power_weight(float(spec["k"]))
        if kind == "exp":
            _take_keys(spec, {"kind", "k"}, "weight")
            return exp_weight(float(spec["k"]))
        if kind == "log-power":
            _take_keys(spec, {"kind", "p"}, "weight")
            return log_power_weight(float(spec["p"]), n)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad weight spec: {exc}") from exc
    raise ConfigError(f"unknown weight kind {kind!r}")


def _constants_from(spec: dict | None, n: int) -> AbpConstants:
    if spec is None:
        raise ConfigError("fixed-constants mode needs a 'constants' object "
                          "with c_n, delta, c2")
    _take_keys(spec, {"c_n", "delta", "c2"}, "constants")
    try:
        return AbpConstants(c_n=float(spec["c_n"]),
                            delta=float(spec.get("delta", default_delta(n))),
                            c2=float(spec["c2"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad constants: {exc}") from exc


def _density_profile(spec: dict, n: int, num_samples: int) -> RadialProfile:
    kind = spec.get("kind")
    if kind == "constant":
        _take_keys(spec, {"kind", "value"}, "density")
        value = float(spec["value"])
        if value <= 0.0:
            raise ConfigError("constant density must be positive")
        return RadialProfile.from_function(
            n, lambda r: np.full_like(r, value), num_samples)
    if kind == "polynomial":
        _take_keys(spec, {"kind", "coeffs"}, "density")
        coeffs = [float(c) for c in spec["coeffs"]]
        return RadialProfile.from_function(
            n, lambda r: sum(c * r ** (2 * k) for k, c in enumerate(coeffs)),
            num_samples)
    raise ConfigError(f"unknown density kind {kind!r}")


def _relpaths(files: list[str], out: Path) -> list[str]:
    return [os.path.relpath(f, out) for f in files]


@dataclass
class RunOutcome:
    ok: bool
    outputs: list[str] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)


# ------------------------------------------------------------------- runners


def _run_abp_verify(cfg: dict, out: Path) -> RunOutcome:
    n = int(cfg["n"])
    spec = GridSpec(n=n, resolution=int(cfg["resolution"]))
    weight = _weight_from(cfg.get("weight"), n)
    family = paraboloid_family(spec, [float(a) for a in cfg["amplitudes"]])
    files: list[str] = []
    if cfg["calibrate"]:
        constants, split = calibrate_constants(
            family, weight, delta=cfg.get("delta"))
        files += emit({"c_n": constants.c_n, "delta": constants.delta,
                       "c2": constants.c2}, str(out / "constants.json"))
        files += emit(split, str(out / "split.json"))
        held = set(split["held_out"])
        min_slack = math.inf
        for i, u in enumerate(family):
            mode = "held-out" if i in held else "fit"
            rep = abp_check(u, weight, constants, mode=mode)
            files += emit(rep, str(out / f"report_{i:02d}.json"))
            if i in held:
                min_slack = min(min_slack, rep.slack)
        ok = min_slack >= 0.0
        verdicts = {"min_held_out_slack": min_slack, "passed": ok}
        tolerances = {"held_out_slack": 0.0}
    else:
        constants = _constants_from(cfg.get("constants"), n)
        min_slack = math.inf
        tol = 10.0 * spec.h**2
        for i, u in enumerate(family):
            rep = abp_check(u, weight, constants, mode="fixed")
            files += emit(rep, str(out / f"report_{i:02d}.json"))
            min_slack = min(min_slack, rep.slack / max(1.0, rep.sup_interior))
        ok = min_slack >= -tol
        verdicts = {"min_relative_slack": min_slack, "passed": ok}
        tolerances = {"relative_slack": -tol}
    return RunOutcome(ok, _relpaths(files, out), tolerances, verdicts)


def _run_drift_verify(cfg: dict, out: Path) -> RunOutcome:
    n = int(cfg["n"])
    spec = GridSpec(n=n, resolution=int(cfg["resolution"]))
    weight = _weight_from(cfg.get("weight"), n)
    amplitudes = [float(a) for a in cfg["amplitudes"]]
    family = paraboloid_family(spec, amplitudes)
    eye = np.eye(n, dtype=complex)
    members = [(u, GridField(spec, np.full(spec.shape, -n * a)))
               for a, u in zip(amplitudes, family)]
    delta = cfg.get("delta") or default_delta(n)
    files: list[str] = []
    if cfg["calibrate"]:
        fit_idx, held_idx = split_indices(len(members))
        probe = AbpConstants(c_n=0.0, delta=delta, c2=0.0)
        c_n = 0.0
        c2 = 0.0
        for i in fit_idx:
            u, f = members[i]
            rep = abp_drift_check(u, eye, f, weight, probe, mode="calibration")
            gap = rep.sup_interior - rep.sup_boundary
            c_n = max(c_n, rep.mass**delta)
            if gap > 0.0:
                c2 = max(c2, gap / rep.entropy ** (1.0 / n))
        constants = AbpConstants(c_n=c_n, delta=delta, c2=c2)
        files += emit({"c_n": c_n, "delta": delta, "c2": c2},
                      str(out / "constants.json"))
        files += emit({"fit": fit_idx, "held_out": held_idx},
                      str(out / "split.json"))
        min_slack = math.inf
        for i, (u, f) in enumerate(members):
            mode = "held-out" if i in held_idx else "fit"
            rep = abp_drift_check(u, eye, f, weight, constants, mode=mode)
            files += emit(rep, str(out / f"report_{i:02d}.json"))
            if i in held_idx:
                min_slack = min(min_slack, rep.slack)
        ok = min_slack >= 0.0
        return RunOutcome(ok, _relpaths(files, out),
                          {"held_out_slack": 0.0},
                          {"min_held_out_slack": min_slack, "passed": ok})
    constants = _constants_from(cfg.get("constants"), n)
    min_slack = math.inf
    for i, (u, f) in enumerate(members):
        rep = abp_drift_check(u, eye, f, weight, constants, mode="fixed")
        files += emit(rep, str(out / f"report_{i:02d}.json"))
        min_slack = min(min_slack, rep.slack / max(1.0, rep.sup_interior))
    tol = 10.0 * spec.h**2
    ok = min_slack >= -tol
    return RunOutcome(ok, _relpaths(files, out), {"relative_slack": -tol},
                      {"min_relative_slack": min_slack, "passed": ok})


def _run_trudinger(cfg: dict, out: Path) -> RunOutcome:
    n = int(cfg["n"])
    if n < 2:
        raise ConfigError("the borderline-weight bound needs n >= 2 "
                          "so that 0 < p < n has room")
    spec = GridSpec(n=n, resolution=int(cfg["resolution"]))
    family = paraboloid_family(spec, [float(a) for a in cfg["amplitudes"]])
    p = float(cfg["p"]) if cfg.get("p") is not None else n - 0.5
    files: list[str] = []
    if cfg["calibrate"]:
        constants = calibrate_trudinger(family, p)
    else:
        raw = cfg.get("constants")
        _take_keys(raw or {}, {"c1", "c2", "c3"}, "constants")
        if raw is None:
            raise ConfigError("fixed-constants mode needs constants c1, c2, c3")
        constants = TrudingerConstants(c1=float(raw["c1"]), c2=float(raw["c2"]),
                                       c3=float(raw["c3"]))
    files += emit({"c1": constants.c1, "c2": constants.c2, "c3": constants.c3,
                   "p": p}, str(out / "constants.json"))
    all_ok = True
    for i, u in enumerate(family):
        rep = trudinger_check(u, p, constants)
        files += emit(rep, str(out / f"report_{i:02d}.json"))
        all_ok = all_ok and rep.passed
    return RunOutcome(all_ok, _relpaths(files, out),
                      {"exp_integral_cap": constants.c3},
                      {"all_passed": all_ok})


def _run_dirichlet_linf(cfg: dict, out: Path) -> RunOutcome:
    n = int(cfg["n"])
    weight = _weight_from(cfg.get("weight"), n)
    num = int(cfg["num_samples"])
    budget = float(cfg["ratio_budget"])
    rows = []
    worst = 0.0
    for k in range(1, int(cfg["spikes"]) + 1):
        prof = RadialProfile.from_function(
            n, lambda r, k=k: 0.75 * k - k * r**2, num)
        rep = dirichlet_l_infinity_check(prof, weight, num_samples=num)
        rows.append((float(k), rep.sup_norm, rep.entropy, rep.ratio))
        worst = max(worst, rep.ratio)
    files = [write_csv(str(out / "ratios.csv"),
                       ["spike", "sup_norm", "entropy", "ratio"], rows)]
    ok = worst <= budget
    return RunOutcome(ok, _relpaths(files, out), {"ratio_budget": budget},
                      {"worst_ratio": worst, "passed": ok})


def _run_ma_solve(cfg: dict, out: Path) -> RunOutcome:
    n = int(cfg["n"])
    num = int(cfg["num_samples"])
    density = _density_profile(cfg["density"], n, num)
    psi = solve_dirichlet_radial(density)
    resid = solver_residual(psi, density.values)
    tol = float(cfg["residual_tol"])
    files = emit(psi, str(out / "psi.csv"))
    files += emit({"residual": resid, "mass": ma_mass(psi),
                   "sup_norm": float(np.max(-psi.values))},
                  str(out / "solution.json"))
    ok = resid <= tol
    return RunOutcome(ok, _relpaths(files, out), {"residual": tol},
                      {"residual": resid, "passed": ok})


def _run_kolodziej_probe(cfg: dict, out: Path) -> RunOutcome:
    eps_values = [float(e) for e in cfg["eps_values"]]
    alphas = np.linspace(float(cfg["alpha_min_pi"]) * math.pi,
                         float(cfg["alpha_max_pi"]) * math.pi,
                         int(cfg["alpha_count"]))
    family = log_singularity_family(eps_values,
                                    num_samples=int(cfg["num_samples"]))
    table = kolodziej_probe(family, alphas.tolist())
    files = emit(table, str(out / "table.csv"))
    files += emit({"alpha_star": table.alpha_star,
                   "alpha_star_over_pi":
                       None if table.alpha_star is None
                       else table.alpha_star / math.pi},
                  str(out / "threshold.json"))
    ok = table.alpha_star is not None
    return RunOutcome(ok, _relpaths(files, out), {},
                      {"alpha_star": table.alpha_star, "passed": ok})


def _run_degiorgi(cfg: dict, out: Path) -> RunOutcome:
    spec = GridSpec(n=1, resolution=int(cfg["resolution"]))
    v = GridField.from_function(spec, lambda x, y: 1.0 - x**2 - y**2)
    f_one = GridField(spec, np.ones(spec.shape))
    curves = level_machinery(v, f_one)
    margin = curves.chain_margin()
    files = emit(curves, str(out / "curves.csv"))
    files += emit({"chain_margin": margin}, str(out / "chain.json"))
    ok = margin >= -1e-3
    return RunOutcome(ok, _relpaths(files, out), {"chain_margin": -1e-3},
                      {"chain_margin": margin, "passed": ok})


def _flow_config_from(cfg: dict) -> tuple[FlowConfig, str]:
    n = int(cfg["n"])
    t_final = float(cfg["T"])
    src = cfg["source"]
    kind = src.get("kind")
    if kind == "constant":
        _take_keys(src, {"kind", "value"}, "source")
        value = float(src["value"])
        source = lambda r, t, v=value: np.full_like(np.asarray(r, float), v)
    elif kind == "quadratic":
        _take_keys(src, {"kind", "base", "bump"}, "source")
        base, bump = float(src["base"]), float(src["bump"])
        source = lambda r, t, a=base, b=bump: a + b * (1.0 - np.asarray(r) ** 2)
    elif kind == "separable":
        _take_keys(src, {"kind", "q0", "beta"}, "source")
        q0, beta = float(src["q0"]), float(src["beta"])
        power = n / (n + 1.0)
        source = lambda r, t, q0=q0, beta=beta, m=n: (
            q0 * (1.0 - np.asarray(r) ** 2)
            + beta * (1.0 + (m + 1) * q0 * t) ** power)
    else:
        raise ConfigError(f"unknown source kind {kind!r}")
    boundary = cfg.get("boundary") or {"kind": "linear"}
    bkind = boundary.get("kind")
    kwargs = {}
    if bkind == "linear":
        _take_keys(boundary, {"kind"}, "boundary")
    elif bkind == "stalling":
        _take_keys(boundary, {"kind", "tau_fraction"}, "boundary")
        tau = t_final * float(boundary["tau_fraction"])
        f0 = float(np.asarray(source(np.array([1.0]), 0.0))[0])
        kwargs["boundary"] = lambda t, a=f0, tau=tau: a * tau * (1.0 - math.exp(-t / tau))
        kwargs["boundary_prime"] = lambda t, a=f0, tau=tau: a * math.exp(-t / tau)
    else:
        raise ConfigError(f"unknown boundary kind {bkind!r}")
    driver = cfg.get("driver", "solve")
    if driver not in ("solve", "frozen"):
        raise ConfigError(f"unknown driver {driver!r}")
    try:
        flow_cfg = FlowConfig(
            n=n, T=t_final, source=source, dt=cfg.get("dt"),
            resolution=cfg.get("resolution"), mode=cfg.get("mode"),
            record_every=int(cfg["record_every"]),
            grad_constant=float(cfg["grad_constant"]), **kwargs)
    except ValueError as exc:
        raise ConfigError(f"bad flow data: {exc}") from exc
    return flow_cfg, driver


def _run_flow(cfg: dict, out: Path) -> RunOutcome:
    flow_cfg, driver = _flow_config_from(cfg)
    state = flow_solve(flow_cfg) if driver == "solve" else frozen_flow_state(flow_cfg)
    monitor = monitor_bounds(state)
    energy = energy_monotonicity_check(state)
    alpha_rep = parabolic_alpha_check(state, float(cfg["alpha"]))
    files = emit(state, str(out / "state"))
    files += emit(monitor, str(out / "monitor.json"))
    files += emit(energy, str(out / "energy.json"))
    files += emit(alpha_rep, str(out / "alpha.json"))
    if driver == "frozen":
        # falsification drivers pass when the monitors flag them
        ok = not monitor.passed
        verdicts = {"violations": monitor.violations, "passed": ok,
                    "expectation": "monitors must flag the frozen state"}
    else:
        ok = monitor.passed and energy.passed
        verdicts = {"monitor_passed": monitor.passed,
                    "energy_passed": energy.passed,
                    "violations": monitor.violations, "passed": ok}
    return RunOutcome(ok, _relpaths(files, out),
                      {"energy_slack_scale": 1e-3}, verdicts)


def _run_parabolic_abp(cfg: dict, out: Path) -> RunOutcome:
    n = int(cfg["n"])
    spec = GridSpec(n=n, resolution=int(cfg["resolution"]))
    # parabolic entropies live one dimension up
    weight = _weight_from(cfg.get("weight"), n + 1)
    times = np.linspace(0.0, float(cfg["t_max"]), int(cfg["time_steps"]))
    amplitudes = cfg.get("amplitudes")
    if amplitudes is None:
        amplitudes = [0.5 * 2.0 ** (k / 2.0) for k in range(10)]
    eye = np.eye(n, dtype=complex)
    members = []
    for amp in [float(a) for a in amplitudes]:
        u = SpaceTimeField.from_function(
            spec, times,
            lambda x, y, t, a=amp: a * (1.0 + t) * (1.0 - x**2 - y**2))
        f = SpaceTimeField.from_function(
            spec, times,
            lambda x, y, t, a=amp: -a * (1.0 - x**2 - y**2) - a * (1.0 + t))
        members.append((u, eye, f))
    files: list[str] = []
    if cfg["calibrate"]:
        constants, split = calibrate_parabolic(members, weight,
                                               delta=cfg.get("delta"))
        files += emit({"c_n": constants.c_n, "delta": constants.delta,
                       "c2": constants.c2}, str(out / "constants.json"))
        files += emit(split, str(out / "split.json"))
        held = set(split["held_out"])
    else:
        constants = _constants_from(cfg.get("constants"), n + 1)
        held = set(range(len(members)))
    min_slack = math.inf
    min_amgm = math.inf
    for i, (u, a, f) in enumerate(members):
        mode = "held-out" if i in held else "fit"
        rep = parabolic_abp_check(u, a, f, weight, constants, mode=mode)
        files += emit(rep, str(out / f"report_{i:02d}.json"))
        if i in held:
            min_slack = min(min_slack, rep.slack)
            min_amgm = min(min_amgm, rep.amgm_slack)
    scale = max(float(np.max(np.abs(m[0].values))) for m in members)
    amgm_tol = 50.0 * spec.h**2 * scale
    ok = min_slack >= 0.0 and min_amgm >= -amgm_tol
    return RunOutcome(ok, _relpaths(files, out),
                      {"held_out_slack": 0.0, "amgm_margin": -amgm_tol},
                      {"min_held_out_slack": min_slack,
                       "min_amgm_margin": min_amgm, "passed": ok})


def _run_torus(cfg: dict, out: Path) -> RunOutcome:
    n = int(cfg["n"])
    spec = PeriodicSpec(n=n, resolution=int(cfg["resolution"]))
    shape_spec = cfg["shape"]
    kind = shape_spec.get("kind")
    if kind == "single":
        _take_keys(shape_spec, {"kind"}, "shape")
        shape = single_mode_shape(n)
    elif kind == "two":
        _take_keys(shape_spec, {"kind"}, "shape")
        shape = two_mode_shape(n)
    elif kind == "random":
        _take_keys(shape_spec, {"kind", "num_modes", "max_freq"}, "shape")
        shape = random_band_shape(n, seed=int(cfg["seed"]),
                                  num_modes=int(shape_spec.get("num_modes", 8)),
                                  max_freq=int(shape_spec.get("max_freq", 2)))
    else:
        raise ConfigError(f"unknown shape kind {kind!r}")
    family = sweep_family(shape, spec, count=int(cfg["count"]),
                          fraction=float(cfg["fraction"]))
    rows = []
    files: list[str] = []
    all_ok = True
    for i, (eps, pair) in enumerate(family):
        rep = gradient_report(pair, lambda_=cfg.get("lambda"),
                              c2=cfg.get("c2"), p=cfg.get("p"), q=cfg.get("q"))
        files += emit(rep, str(out / f"report_{i:02d}.json"))
        rows.append((eps, rep.h_max, rep.h_l1, rep.entropy_f, rep.ef_lq,
                     rep.ratio, rep.lemma_margin))
        all_ok = all_ok and rep.passed
    files.append(write_csv(
        str(out / "sweep.csv"),
        ["eps", "H_max", "H_L1", "entropy_F", "eF_Lq", "ratio", "lemma_margin"],
        rows))
    return RunOutcome(all_ok, _relpaths(files, out),
                      {"lemma_margin": "O(h^2) scaled, see reports"},
                      {"all_passed": all_ok})


# --------------------------------------------------------------- dispatching


@dataclass(frozen=True)
class _Runner:
    module: str
    fn: object
    defaults: dict


RUNNERS: dict[str, _Runner] = {
    "abp-verify": _Runner("abp", _run_abp_verify, {
        "n": 1, "resolution": 96,
        "amplitudes": [1, 2, 4, 8, 16, 32, 64],
        "weight": None, "calibrate": True, "constants": None,
        "delta": None, "seed": 0}),
    "drift-verify": _Runner("abp", _run_drift_verify, {
        "n": 1, "resolution": 96, "amplitudes": [1, 2, 4, 8],
        "weight": None, "calibrate": True, "constants": None,
        "delta": None, "seed": 0}),
    "trudinger": _Runner("abp", _run_trudinger, {
        "n": 2, "resolution": 40, "amplitudes": [1, 2, 4, 8, 16],
        "p": None, "calibrate": True, "constants": None, "seed": 0}),
    "dirichlet-linf": _Runner("abp", _run_dirichlet_linf, {
        "n": 1, "num_samples": 2049, "spikes": 6, "weight": None,
        "ratio_budget": 2.0, "seed": 0}),
    "ma-solve": _Runner("ma_radial", _run_ma_solve, {
        "n": 2, "num_samples": 1025,
        "density": {"kind": "constant", "value": 2.0},
        "residual_tol": 5e-3, "seed": 0}),
    "kolodziej-probe": _Runner("ma_radial", _run_kolodziej_probe, {
        "eps_values": [0.2, 0.1, 0.05, 0.025],
        "alpha_min_pi": 0.1, "alpha_max_pi": 1.35, "alpha_count": 26,
        "num_samples": 4097, "seed": 0}),
    "degiorgi": _Runner("degiorgi", _run_degiorgi, {
        "resolution": 128, "seed": 0}),
    "flow": _Runner("flow", _run_flow, {
        "n": 2, "T": 0.5, "dt": None, "resolution": 257, "mode": None,
        "record_every": 10, "grad_constant": 5.0, "alpha": 1.0,
        "source": {"kind": "constant", "value": 1.0},
        "boundary": None, "driver": "solve", "seed": 0}),
    "parabolic-abp": _Runner("flow", _run_parabolic_abp, {
        "n": 1, "resolution": 48, "t_max": 0.5, "time_steps": 9,
        "amplitudes": None, "weight": None, "calibrate": True,
        "constants": None, "delta": None, "seed": 0}),
    "torus": _Runner("torus", _run_torus, {
        "n": 1, "resolution": 64, "shape": {"kind": "single"},
        "count": 5, "fraction": 0.9, "lambda": None, "c2": None,
        "p": None, "q": None, "seed": 0}),
}

# small-footprint configs for the bundled suite run (and the determinism
# probe, which runs the bundle twice and compares bytes)
SUITE_BUNDLE: dict[str, dict] = {
    "abp-verify": {"resolution": 64, "amplitudes": [1, 2, 4, 8, 16, 32]},
    "drift-verify": {"resolution": 64},
    "trudinger": {"resolution": 32, "amplitudes": [1, 2, 4, 8]},
    "dirichlet-linf": {"num_samples": 1025},
    "ma-solve": {},
    "kolodziej-probe": {"num_samples": 2049},
    "degiorgi": {"resolution": 96},
    "flow": {"n": 1, "T": 0.05, "dt": 0.0025, "resolution": 32,
             "record_every": 5},
    "parabolic-abp": {"resolution": 32, "time_steps": 5,
                      "amplitudes": [0.5, 1, 2, 4, 8, 16]},
    "torus": {"resolution": 32, "count": 3},
}


def _execute(name: str, cfg: dict, out: Path) -> bool:
    out.mkdir(parents=True, exist_ok=True)
    runner = RUNNERS[name]
    outcome = runner.fn(cfg, out)
    manifest = RunManifest(
        experiment=name, module=runner.module, config_hash=config_hash(cfg),
        inputs=cfg, outputs=outcome.outputs, tolerances=outcome.tolerances,
        verdicts=outcome.verdicts)
    manifest.write(str(out / "manifest.json"))
    manifest.validate(str(out))
    return outcome.ok


def run_default_suite(out_dir: Path, seed: int = 0,
                      jobs: int = 1) -> list[tuple[str, bool]]:
    """Run every experiment once with its small bundled config."""
    tasks = []
    for name, overrides in SUITE_BUNDLE.items():
        cfg = json.loads(json.dumps(RUNNERS[name].defaults))
        cfg.update(overrides)
        cfg["seed"] = seed
        tasks.append((name, cfg, out_dir / name))

    def one(task):
        name, cfg, sub = task
        return name, _execute(name, cfg, sub)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    write_json(str(out_dir / "suite.json"),
               {"experiments": {name: ok for name, ok in results},
                "all_passed": all(ok for _, ok in results)})
    return results


def _run_suite(args, out: Path) -> int:
    if args.acceptance:
        from .acceptance import run_acceptance

        results = run_acceptance(seed=args.seed or 0, jobs=args.jobs or 1)
        out.mkdir(parents=True, exist_ok=True)
        for res in results:
            print(res.line())
        write_json(str(out / "acceptance_summary.json"),
                   {"criteria": [r.to_json_dict() for r in results],
                    "all_passed": all(r.passed for r in results)})
        return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED
    results = run_default_suite(out, seed=args.seed or 0, jobs=args.jobs or 1)
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(ok for _, ok in results) else EXIT_CHECK_FAILED


# ----------------------------------------------------------------- arguments


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abplab",
        description="Numerical experiments for refined sup bounds of "
                    "plurisubharmonic-type functions")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(RUNNERS) + ["suite"]:
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="PATH", default=None)
        sp.add_argument("--out", metavar="DIR", default=None)
        sp.add_argument("--jobs", type=int, default=None, metavar="N")
        sp.add_argument("--seed", type=int, default=None, metavar="S")
        sp.add_argument("--resolution", type=int, default=None, metavar="N")
        group = sp.add_mutually_exclusive_group()
        group.add_argument("--fixed-constants", action="store_true")
        group.add_argument("--calibrate", action="store_true")
        if name == "suite":
            sp.add_argument("--acceptance", action="store_true")
    return parser


def _out_dir(args) -> Path:
    env = os.environ.get("ABPLAB_OUT")
    if env:
        return Path(env) / args.command
    if args.out:
        return Path(args.out)
    return Path.cwd() / "abplab-out" / args.command


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    out = _out_dir(args)
    try:
        if args.command == "suite":
            return _run_suite(args, out)
        overrides: dict = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.resolution is not None:
            key = ("num_samples"
                   if "num_samples" in RUNNERS[args.command].defaults
                   else "resolution")
            overrides[key] = args.resolution
        if args.fixed_constants:
            overrides["calibrate"] = False
        if args.calibrate:
            overrides["calibrate"] = True
        cfg = _merge_config(RUNNERS[args.command].defaults, args.config,
                            overrides)
        if "calibrate" in overrides and "calibrate" not in RUNNERS[args.command].defaults:
            raise ConfigError(
                f"{args.command} has no constants to fix or calibrate")
        ok = _execute(args.command, cfg, out)
        return EXIT_OK if ok else EXIT_CHECK_FAILED
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, ValueError, FloatingPointError,
            np.linalg.LinAlgError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
