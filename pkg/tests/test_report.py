import json
import math

import numpy as np
import pytest

from abplab.degiorgi import level_machinery
from abplab.flow import FlowConfig, flow_solve
from abplab.grid import GridField, GridSpec
from abplab.ma_radial import kolodziej_probe, log_singularity_family
from abplab.radial import RadialProfile
from abplab.report import (RunManifest, config_hash, emit, format_value,
                           read_csv, read_field, read_profile, write_csv,
                           write_field, write_json, write_profile)


def test_format_value_round_trips_doubles():
    for x in (1.0 / 3.0, math.pi, 1e-300, -2.5e17, 0.1 + 0.2):
        assert float(format_value(x)) == x
    assert format_value(True) == "true"
    assert format_value(np.bool_(False)) == "false"
    assert format_value(np.int64(7)) == "7"
    assert format_value("label") == "label"


def test_csv_round_trip(tmp_path):
    path = str(tmp_path / "t.csv")
    rows = [(0.1, 2), (1.0 / 7.0, -3)]
    write_csv(path, ["a", "b"], rows)
    text = (tmp_path / "t.csv").read_text()
    assert text.endswith("\n") and not text.endswith("\n\n")
    header, data = read_csv(path)
    assert header == ["a", "b"]
    assert data[1, 0] == 1.0 / 7.0
    assert data[0, 1] == 2.0


def test_json_is_sorted_and_newline_terminated(tmp_path):
    path = str(tmp_path / "r.json")
    write_json(path, {"zeta": np.float64(1.5), "alpha": np.int32(2),
                      "flag": np.bool_(True), "arr": np.arange(3)})
    text = (tmp_path / "r.json").read_text()
    assert text.endswith("\n")
    assert text.index('"alpha"') < text.index('"arr"') < text.index('"zeta"')
    assert json.loads(text) == {"zeta": 1.5, "alpha": 2, "flag": True,
                                "arr": [0, 1, 2]}


def test_config_hash_ignores_key_order():
    a = {"x": 1, "y": [1, 2], "z": {"p": 0.5}}
    b = {"z": {"p": 0.5}, "y": [1, 2], "x": 1}
    assert config_hash(a) == config_hash(b)
    assert len(config_hash(a)) == 64
    assert config_hash(a) != config_hash({**a, "x": 2})


def test_manifest_validates_outputs(tmp_path):
    (tmp_path / "there.json").write_text("{}\n")
    man = RunManifest(experiment="e", module="m", config_hash="0" * 64,
                      outputs=["there.json"])
    man.validate(str(tmp_path))
    man.outputs.append("gone.csv")
    with pytest.raises(FileNotFoundError, match="gone.csv"):
        man.validate(str(tmp_path))
    man.write(str(tmp_path / "manifest.json"))
    payload = json.loads((tmp_path / "manifest.json").read_text())
    assert payload["outputs"] == ["gone.csv", "there.json"]


def test_field_round_trip(tmp_path):
    spec = GridSpec(n=1, resolution=24)
    rng = np.random.default_rng(2)
    u = GridField(spec, rng.normal(size=spec.shape))
    files = write_field(str(tmp_path / "u"), u)
    assert sorted(f.rsplit(".", 1)[1] for f in files) == ["bin", "json"]
    header = json.loads((tmp_path / "u.json").read_text())
    assert header == {"n": 1, "resolution": 24, "half_width": spec.half_width}
    back = read_field(str(tmp_path / "u"))
    assert back.spec == spec
    assert np.array_equal(back.values, u.values)


def test_profile_round_trip(tmp_path):
    p = RadialProfile.from_function(2, lambda r: np.sin(3.0 * r) - math.e, 129)
    path = write_profile(str(tmp_path / "p.csv"), p)
    back = read_profile(path, 2)
    assert back.n == 2
    assert np.array_equal(back.values, p.values)


def test_flow_state_directory_layout(tmp_path):
    cfg = FlowConfig(n=2, T=0.02, dt=0.01, resolution=65, mode="radial",
                     source=lambda r, t: 1.0 + 0.0 * np.asarray(r))
    state = flow_solve(cfg)
    out = tmp_path / "flow"
    files = emit(state, str(out))
    for f in files:
        assert (tmp_path / "flow" / f.rsplit("/", 1)[-1]).exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["mode"] == "radial"
    assert len(manifest["slices"]) == len(manifest["times"])
    for fname in manifest["slices"]:
        assert (out / fname).exists()
    header, data = read_csv(str(out / "monitors.csv"))
    assert header[0] == "t"
    assert data.shape[0] == len(manifest["times"])


def test_emit_dispatch(tmp_path):
    spec = GridSpec(n=1, resolution=24)
    v = GridField(spec, 1.0 - spec.radius_sq)
    F = GridField(spec, np.ones(spec.shape))
    files = emit(level_machinery(v, F), str(tmp_path / "curves.csv"))
    header, _ = read_csv(files[0])
    assert header == ["s", "phi", "A"]

    table = kolodziej_probe(log_singularity_family([0.2, 0.1, 0.05]),
                            [1.0, 2.0])
    files = emit(table, str(tmp_path / "probe.csv"))
    header, data = read_csv(files[0])
    assert header == ["family_param", "alpha", "integral", "mass"]
    assert data.shape == (6, 4)

    files = emit({"answer": 42}, str(tmp_path / "d.json"))
    assert json.loads((tmp_path / "d.json").read_text()) == {"answer": 42}

    with pytest.raises(TypeError, match="serialization"):
        emit(object(), str(tmp_path / "x"))


def test_emit_is_byte_deterministic(tmp_path):
    spec = GridSpec(n=1, resolution=16)
    u = GridField(spec, np.cos(spec.radius_sq))
    emit(u, str(tmp_path / "a"))
    emit(u, str(tmp_path / "b"))
    assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()
