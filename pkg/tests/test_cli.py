import json

import pytest

from toa_lab.cli import EXIT_CONFIG, EXIT_OK, EXIT_TOLERANCE, main, parse_config_text
from toa_lab.experiments import EXPERIMENTS, ConfigError, resolve, validate


def test_every_named_experiment_is_registered():
    names = {
        "clock-readout", "detection-sweep", "two-peak", "trigger-sweep", "multi-trigger", "booster-curve",
        "gradual-tradeoff", "toa-overlap", "toa-tail", "toa-commutator", "eigenstate-trigger", "oracle-crosscheck",
    }
    assert names <= set(EXPERIMENTS)


def test_multi_trigger_run_writes_exact_column(tmp_path, capsys):
    assert main(["multi-trigger", "--out", str(tmp_path)]) == EXIT_OK
    lines = (tmp_path / "data.csv").read_text().splitlines()
    assert lines[0] == "N,probability_exact,probability,one_minus_two_pow_minus_N"
    assert lines[10].startswith("10,1023/1024,")
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"] == {"n_max": 10}
    assert manifest["passed"] is True
    assert "multi-trigger: PASS" in (tmp_path / "summary.txt").read_text()


def test_outputs_are_bit_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["detection-sweep", "--out", str(tmp_path / d)]) == EXIT_OK
    assert (tmp_path / "a" / "data.csv").read_bytes() == (tmp_path / "b" / "data.csv").read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    slope = manifest["checks"][0]
    assert slope["passed"] and abs(slope["value"] - 0.5) <= 0.05
    assert manifest["config"]["points"] == 29  # defaults echoed


def test_eigenstate_trigger_column_is_monotone(tmp_path):
    assert main(["eigenstate-trigger", "--out", str(tmp_path)]) == EXIT_OK
    rows = (tmp_path / "data.csv").read_text().splitlines()[1:]
    w = [float(r.split(",")[2]) for r in rows]
    assert all(a > b for a, b in zip(w, w[1:]))


def test_negative_dy_rejected_with_key_name(capsys):
    assert main(["clock-readout", "--override", "dy=-1"]) == EXIT_CONFIG
    assert "dy" in capsys.readouterr().err


def test_unknown_key_rejected(capsys):
    assert main(["clock-readout", "--override", "speed=3", "--validate-only"]) == EXIT_CONFIG
    assert "speed: unknown key" in capsys.readouterr().err


def test_bad_value_rejected(capsys):
    assert main(["multi-trigger", "--override", "n_max=2.5"]) == EXIT_CONFIG
    assert "n_max" in capsys.readouterr().err


def test_inaccurate_preset_passes_regime_checks():
    exp = EXPERIMENTS["clock-readout"]
    assert validate(exp, resolve(exp, {})) == []


def test_clock_below_momentum_floor_rejected():
    exp = EXPERIMENTS["clock-readout"]
    with pytest.raises(ConfigError) as err:
        validate(exp, resolve(exp, {"p0": 0.1}))
    assert "p0" in err.value.problems


def test_unlocalized_packet_warns(capsys):
    assert main(["clock-readout", "--override", "x0=4", "--validate-only"]) == EXIT_OK
    assert "not localized" in capsys.readouterr().err


def test_two_peak_window_checked():
    exp = EXPERIMENTS["two-peak"]
    with pytest.raises(ConfigError) as err:
        validate(exp, resolve(exp, {"dy_window": 5.0}))
    assert "dy_window" in err.value.problems


def test_config_file_and_json(tmp_path, capsys):
    text = tmp_path / "run.cfg"
    text.write_text("# coarse\nbins = 100\ndy=4.0\n")
    assert main(["clock-readout", "--config", str(text), "--out", str(tmp_path / "o")]) == EXIT_OK
    cfg = json.loads((tmp_path / "o" / "manifest.json").read_text())["config"]
    assert cfg["bins"] == 100 and cfg["dy"] == 4.0 and cfg["x0"] == 30.0
    assert parse_config_text('{"separations": [0.5, 1.0], "m": 2}') == {"separations": "0.5,1.0", "m": 2}
    with pytest.raises(ConfigError):
        parse_config_text("bins 100")


def test_override_beats_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"n_max": 3}')
    assert main(["multi-trigger", "--config", str(cfg), "--override", "n_max=4", "--out", str(tmp_path / "o")]) == 0
    assert len((tmp_path / "o" / "data.csv").read_text().splitlines()) == 5


def test_tolerance_failure_exit_code(capsys):
    # The toy slope check cannot pass: the tuned design sits at a transmission maximum.
    assert main(["booster-curve"]) == EXIT_TOLERANCE
    assert "tolerance failure" in capsys.readouterr().err


def test_bad_thread_count(capsys):
    assert main(["multi-trigger", "--threads", "0"]) == EXIT_CONFIG
    assert "--threads" in capsys.readouterr().err


def test_criterion_subcommand(tmp_path):
    assert main(["criterion", "7", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "multi-trigger" / "data.csv").exists()
    assert (tmp_path / "trigger-sweep" / "manifest.json").exists()
