"""Command-line interface and experiment-registry contract tests."""

import json
import os

import pytest

from toalab.cli import main
from toalab.experiments import (
    ConfigError,
    EXPERIMENTS,
    catalog,
    default_config,
    validate_config,
    run_experiment,
)

EXPECTED_NAMES = [
    "trigger-flip",
    "multi-trigger",
    "clock-accuracy-scan",
    "two-gaussian",
    "zero-current",
    "zeno-scan",
    "current-vs-arrival",
    "presence-vs-arrival",
    "cascade",
    "booster",
    "toa-spectrum",
    "toa-drift",
    "toa-kernel",
    "coherent-energy",
    "eigenstate-trigger",
]


def test_registry_names_and_metadata():
    assert list(EXPERIMENTS) == EXPECTED_NAMES
    for name, description, claim in catalog():
        assert description and claim


def test_list_command(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in EXPECTED_NAMES:
        assert name in out


def test_unknown_experiment_is_config_error():
    assert main(["run", "no-such-experiment"]) == 2


def test_unknown_config_key_rejected(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"n_max": 4, "bogus": 1}))
    assert main(["run", "multi-trigger", "--config", str(cfg),
                 "--out", str(tmp_path / "runs")]) == 2


def test_nested_unknown_key_rejected():
    with pytest.raises(ConfigError):
        validate_config({"grid": {"n": 512, "typo": 1}},
                        default_config("trigger-flip"))


def test_wrong_type_rejected():
    with pytest.raises(ConfigError):
        validate_config({"n_max": "six"}, default_config("multi-trigger"))


def test_validate_command(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"experiment": "multi-trigger", "n_max": 3}))
    assert main(["validate", "--config", str(good)]) == 0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "multi-trigger", "oops": 3}))
    assert main(["validate", "--config", str(bad)]) == 2

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"n_max": 3}))
    assert main(["validate", "--config", str(missing)]) == 2

    assert main(["validate", "--config", str(tmp_path / "absent.json")]) == 2


def test_run_writes_artifacts(tmp_path):
    out = tmp_path / "runs"
    assert main(["run", "multi-trigger", "--out", str(out)]) == 0
    d = out / "multi-trigger"
    csv = (d / "series-flip.csv").read_text().splitlines()
    assert csv[0] == "n_triggers,flip_probability"
    assert csv[1] == "1,0.5"
    assert len(csv) == 7
    summary = json.loads((d / "summary.json").read_text())
    assert summary["passed"] is True
    assert all(c["passed"] for c in summary["checks"])
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["experiment"] == "multi-trigger"
    assert manifest["seed"] == 0
    assert manifest["config"] == default_config("multi-trigger")
    assert "wall_time_seconds" in manifest


def test_run_is_deterministic(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["run", "multi-trigger", "--out", str(out)]) == 0
    for fname in ("series-flip.csv", "summary.json"):
        a = (out_a / "multi-trigger" / fname).read_bytes()
        b = (out_b / "multi-trigger" / fname).read_bytes()
        assert a == b


def test_output_root_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("TOALAB_OUT", str(tmp_path / "env-root"))
    assert main(["run", "multi-trigger"]) == 0
    assert (tmp_path / "env-root" / "multi-trigger" / "summary.json").exists()


def test_failed_check_exit_code(tmp_path):
    # an impossible bound: the scan cannot be suppressed below 0.1 at
    # delta_t * E = 1, so the default check fails and the CLI reports it
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"dte_values": [10.0, 3.0, 1.0]}))
    out = tmp_path / "runs"
    code = main(["run", "clock-accuracy-scan", "--config", str(cfg),
                 "--out", str(out)])
    assert code == 1
    summary = json.loads((out / "clock-accuracy-scan" / "summary.json").read_text())
    assert summary["passed"] is False


def test_config_experiment_name_mismatch(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "multi-trigger"}))
    assert main(["run", "clock-accuracy-scan", "--config", str(cfg)]) == 2


def test_run_experiment_api_bundle():
    result = run_experiment("multi-trigger", {"n_max": 4}, seed=7)
    assert result["seed"] == 7
    assert result["passed"] is True
    assert result["config"]["n_max"] == 4
    header, rows = result["series"]["flip"]
    assert header == ["n_triggers", "flip_probability"]
    assert len(rows) == 4
