import json
import os

import pytest

from abplab.cli import (EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK, ConfigError,
                        _merge_config, main)


def _clean_env(monkeypatch):
    monkeypatch.delenv("ABPLAB_OUT", raising=False)


def test_degiorgi_run_writes_manifest(tmp_path, monkeypatch):
    _clean_env(monkeypatch)
    out = tmp_path / "dg"
    code = main(["degiorgi", "--resolution", "64", "--out", str(out)])
    assert code == EXIT_OK
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["module"] == "degiorgi"
    assert manifest["verdicts"]["passed"] is True
    for rel in manifest["outputs"]:
        assert (out / rel).exists()


def test_unknown_config_key_exits_2(tmp_path, monkeypatch):
    _clean_env(monkeypatch)
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"resolution": 64, "typo_key": 1}))
    code = main(["degiorgi", "--config", str(cfg),
                 "--out", str(tmp_path / "o")])
    assert code == EXIT_CONFIG


def test_malformed_json_exits_2(tmp_path, monkeypatch):
    _clean_env(monkeypatch)
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    code = main(["degiorgi", "--config", str(cfg),
                 "--out", str(tmp_path / "o")])
    assert code == EXIT_CONFIG


def test_calibrate_flag_needs_a_calibrating_command(tmp_path, monkeypatch):
    _clean_env(monkeypatch)
    code = main(["degiorgi", "--calibrate", "--out", str(tmp_path / "o")])
    assert code == EXIT_CONFIG


def test_failed_check_exits_1(tmp_path, monkeypatch):
    """asking the probe only about exponents beyond the blow-up threshold
    leaves nothing bounded, so the run completes but the check fails"""
    _clean_env(monkeypatch)
    cfg = tmp_path / "probe.json"
    cfg.write_text(json.dumps({
        "eps_values": [0.2, 0.1, 0.05],
        "alpha_min_pi": 1.6, "alpha_max_pi": 2.0, "alpha_count": 3,
        "num_samples": 1025}))
    out = tmp_path / "probe-out"
    code = main(["kolodziej-probe", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_CHECK_FAILED
    threshold = json.loads((out / "threshold.json").read_text())
    assert threshold["alpha_star"] is None


def test_frozen_driver_passes_when_flagged(tmp_path, monkeypatch):
    _clean_env(monkeypatch)
    cfg = tmp_path / "frozen.json"
    cfg.write_text(json.dumps({
        "n": 1, "T": 0.1, "dt": 0.01, "resolution": 65, "mode": "radial",
        "record_every": 5, "driver": "frozen",
        "source": {"kind": "quadratic", "base": 1.0, "bump": 0.5}}))
    out = tmp_path / "frozen-out"
    code = main(["flow", "--config", str(cfg), "--out", str(out)])
    assert code == EXIT_OK
    monitor = json.loads((out / "monitor.json").read_text())
    assert monitor["passed"] is False
    assert any("residual" in v for v in monitor["violations"])


def test_env_var_overrides_out(tmp_path, monkeypatch):
    monkeypatch.setenv("ABPLAB_OUT", str(tmp_path / "env-root"))
    code = main(["degiorgi", "--resolution", "64",
                 "--out", str(tmp_path / "ignored")])
    assert code == EXIT_OK
    assert (tmp_path / "env-root" / "degiorgi" / "manifest.json").exists()
    assert not (tmp_path / "ignored").exists()


def test_reruns_are_byte_identical(tmp_path, monkeypatch):
    _clean_env(monkeypatch)
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["degiorgi", "--resolution", "64",
                     "--out", str(out)]) == EXIT_OK
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_merge_config_layers(tmp_path):
    # file keys are validated against the defaults; flag overrides are
    # built from known argparse options and win over the file
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"resolution": 96}))
    merged = _merge_config({"resolution": 128, "seed": 0}, str(cfg),
                           {"seed": 3})
    assert merged == {"resolution": 96, "seed": 3}
    cfg.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ConfigError, match="bogus"):
        _merge_config({"resolution": 128}, str(cfg), {})
    with pytest.raises(ConfigError, match="root"):
        cfg.write_text("[1, 2]")
        _merge_config({"resolution": 128}, str(cfg), {})


def test_unknown_subcommand_exits_via_argparse(capsys):
    with pytest.raises(SystemExit):
        main(["not-a-command"])
    capsys.readouterr()
