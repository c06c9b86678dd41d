"""Serialization of reports, fields, curves, and flow runs.

Formats are fixed so reruns diff cleanly:

* structured reports -> JSON, keys sorted, two-space indent;
* curves and traces -> CSV, '.' decimal, 17 significant digits (enough
  to round-trip a double exactly);
* grid fields -> raw little-endian float64 in row-major order next to a
  JSON header carrying {n, resolution, half_width};
* flow runs -> a directory with a manifest naming every slice file plus
  a monitor-trace CSV.

Nothing here timestamps its output; identical inputs produce identical
bytes.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .grid import GridField, GridSpec
from .radial import RadialProfile

__all__ = [
    "RunManifest",
    "config_hash",
    "format_value",
    "write_csv",
    "write_json",
    "write_field",
    "read_field",
    "write_profile",
    "read_profile",
    "emit",
    "write_flow_state",
]


def format_value(x) -> str:
    """CSV cell: 17 significant digits for floats, plain text otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: str, header: list[str], rows) -> str:
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(format_value(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"could not write CSV {path}: {exc}") from exc
    return path


def read_csv(path: str) -> tuple[list[str], np.ndarray]:
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        raise OSError(f"could not read CSV {path}: {exc}") from exc
    return header, data


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path: str, payload: dict) -> str:
    try:
        with open(path, "w") as fh:
            json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"could not write JSON {path}: {exc}") from exc
    return path


def config_hash(config: dict) -> str:
    """sha256 of the canonical (sorted-key) JSON encoding; insensitive to
    key order in the source dict."""
    canon = json.dumps(_jsonable(config), sort_keys=True,
                       separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class RunManifest:
    experiment: str
    module: str
    config_hash: str
    inputs: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "module": self.module,
            "config_hash": self.config_hash,
            "inputs": self.inputs,
            "outputs": sorted(self.outputs),
            "tolerances": self.tolerances,
            "verdicts": self.verdicts,
        }

    def write(self, path: str) -> str:
        return write_json(path, self.to_json_dict())

    def validate(self, base_dir: str) -> None:
        missing = [f for f in self.outputs
                   if not os.path.exists(os.path.join(base_dir, f))]
        if missing:
            raise FileNotFoundError(
                f"manifest for {self.experiment} lists missing outputs: "
                f"{missing}")


# -------------------------------------------------------------------- fields

def write_field(path_base: str, u: GridField) -> list[str]:
    """path_base.bin (raw float64, row-major, little-endian) plus
    path_base.json with the grid header."""
    bin_path = path_base + ".bin"
    hdr_path = path_base + ".json"
    try:
        u.values.astype("<f8").tofile(bin_path)
    except OSError as exc:
        raise OSError(f"could not write field {bin_path}: {exc}") from exc
    write_json(hdr_path, {
        "n": u.spec.n,
        "resolution": u.spec.resolution,
        "half_width": u.spec.half_width,
    })
    return [bin_path, hdr_path]


def read_field(path_base: str) -> GridField:
    hdr_path = path_base + ".json"
    bin_path = path_base + ".bin"
    try:
        with open(hdr_path) as fh:
            hdr = json.load(fh)
        spec = GridSpec(n=int(hdr["n"]), resolution=int(hdr["resolution"]),
                        half_width=float(hdr["half_width"]))
        raw = np.fromfile(bin_path, dtype="<f8")
    except OSError as exc:
        raise OSError(f"could not read field {path_base}: {exc}") from exc
    return GridField(spec, raw.astype(float).reshape(spec.shape))


def write_profile(path: str, p: RadialProfile) -> str:
    return write_csv(path, ["r", "value"], zip(p.radii, p.values))


def read_profile(path: str, n: int) -> RadialProfile:
    _, data = read_csv(path)
    return RadialProfile(n, data[:, 1].copy())


# -------------------------------------------------------------------- emit

def write_flow_state(state, out_dir: str) -> list[str]:
    """Directory layout: manifest.json naming every slice, monitors.csv
    with the trace columns, one file per recorded slice."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    slice_files = []
    for k, sl in enumerate(state.slices):
        stem = f"slice_{k:05d}"
        if isinstance(sl, RadialProfile):
            fname = stem + ".csv"
            write_profile(os.path.join(out_dir, fname), sl)
            slice_files.append(fname)
            written.append(fname)
        else:
            files = write_field(os.path.join(out_dir, stem), sl)
            slice_files.append(stem + ".bin")
            written.extend(os.path.basename(f) for f in files)
    mon = "monitors.csv"
    write_csv(os.path.join(out_dir, mon),
              ["t", "min_neg_ut", "max_neg_ut", "max_grad", "energy",
               "rhs_energy"],
              zip(state.times, state.neg_ut_min, state.neg_ut_max,
                  state.max_grad, state.energy, state.rhs_energy))
    written.append(mon)
    manifest = "manifest.json"
    write_json(os.path.join(out_dir, manifest), {
        "mode": state.mode,
        "n": state.n,
        "times": state.times,
        "boundary": state.boundary_values(),
        "slices": slice_files,
        "flow_residual": state.flow_residual,
        "violations": state.violations,
    })
    written.append(manifest)
    return [os.path.join(out_dir, f) for f in written]


def emit(obj, path: str) -> list[str]:
    """Serialize any report-like object; returns the files written.

    Dispatch: objects with to_json_dict go to one JSON file; GridField
    and RadialProfile use the field/profile formats; flow states expand
    into a directory; De Giorgi level curves and probe tables go to CSV
    with their documented headers.
    """
    from .degiorgi import LevelCurves
    from .flow import FlowState
    from .ma_radial import KolodziejTable

    if isinstance(obj, FlowState):
        return write_flow_state(obj, path)
    if isinstance(obj, LevelCurves):
        return [write_csv(path, ["s", "phi", "A"], obj.rows())]
    if isinstance(obj, KolodziejTable):
        rows = [(r.family_param, r.alpha, r.integral, r.mass)
                for r in obj.rows]
        return [write_csv(path, ["family_param", "alpha", "integral", "mass"],
                          rows)]
    if isinstance(obj, GridField):
        return write_field(path, obj)
    if isinstance(obj, RadialProfile):
        return [write_profile(path, obj)]
    if hasattr(obj, "to_json_dict"):
        return [write_json(path, obj.to_json_dict())]
    if isinstance(obj, dict):
        return [write_json(path, obj)]
    raise TypeError(f"no serialization rule for {type(obj).__name__}")
