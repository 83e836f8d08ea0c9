import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from mimnoise import cli, io, validation
from mimnoise.noise import sff
from mimnoise.params import from_record

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(*argv) -> int:
    return cli.main([str(a) for a in argv])


def write_config(tmp_path, **rec) -> Path:
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(rec))
    return path


BASE = dict(J=2.0, kappa_L=1.0, kappa_R=0.2, g=1.0, omega_m=0.5, delta=0.1, alpha_L_re=1.0)


# -- io --------------------------------------------------------------------------


def test_csv_round_trip(tmp_path):
    cols = {"x": np.array([0.1, 1 / 3, -2e-300]), "n": np.array([1, 2, 3])}
    path = io.write_csv(tmp_path / "a.csv", {"k": 1.5, "z": 1 + 2j, "t": math.inf}, cols)
    header, data = io.read_csv(path)
    assert header == {"k": 1.5, "z": {"re": 1.0, "im": 2.0}, "t": "inf"}
    np.testing.assert_array_equal(data["x"], cols["x"])
    np.testing.assert_array_equal(data["n"], cols["n"])


def test_csv_rejects_ragged_columns(tmp_path):
    with pytest.raises(ValueError):
        io.write_csv(tmp_path / "a.csv", {}, {"a": [1, 2], "b": [1]})


def test_csv_needs_header(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        io.read_csv(path)


def test_jsonable_handles_numpy():
    out = io.jsonable({"a": np.float64(2.0), "b": np.arange(3), "c": np.int64(4), "d": (np.nan,), "e": np.bool_(True)})
    assert out == {"a": 2.0, "b": [0, 1, 2], "c": 4, "d": ["nan"], "e": True}
    json.dumps(out)


# -- commands ------------------------------------------------------------------------


def test_spectrum_matches_library(tmp_path):
    cfg = write_config(tmp_path, **BASE)
    assert run("spectrum", "--config", cfg, "--grid", "-3:3:61", "--out", tmp_path / "out") == 0
    header, data = io.read_csv(tmp_path / "out" / "spectrum.csv")
    p, d = from_record(BASE)
    np.testing.assert_array_equal(data["s_ff"], sff(np.linspace(-3, 3, 61), p, d))
    assert header["run_config"]["params"] == BASE


def test_spectrum_overlay_writes_one_file_per_value(tmp_path):
    assert run("spectrum", "--config", CONFIGS / "dip_overlay.json", "--out", tmp_path) == 0
    names = sorted(f.name for f in tmp_path.glob("spectrum_*.csv"))
    assert names == ["spectrum_kappa_R=0.0.csv", "spectrum_kappa_R=0.25.csv", "spectrum_kappa_R=1.0.csv"]
    _, data = io.read_csv(tmp_path / "spectrum_kappa_R=0.0.csv")
    mid = data["s_ff"][np.argmin(np.abs(data["omega"]))]
    assert mid < 1e-20


def test_rerun_from_output_is_bit_identical(tmp_path):
    cfg = write_config(tmp_path, **BASE, variant="large-j")
    assert run("spectrum", "--config", cfg, "--grid", "-2:2:41", "--out", tmp_path / "a") == 0
    first = tmp_path / "a" / "spectrum.csv"
    assert run("spectrum", "--config", first, "--out", tmp_path / "b") == 0
    assert (tmp_path / "b" / "spectrum.csv").read_bytes() == first.read_bytes()


def test_embedded_config_for_other_command_is_rejected(tmp_path):
    cfg = write_config(tmp_path, **BASE)
    run("spectrum", "--config", cfg, "--grid", "-1:1:5", "--out", tmp_path)
    assert run("qnd", "--config", tmp_path / "spectrum.csv", "--out", tmp_path) == 2


def test_optimize_cold_detuning(tmp_path, capsys):
    cfg = write_config(tmp_path, **{**BASE, "kappa_R": 0.0}, objective="s_minus", variable="delta",
                       bounds=[-2, 2], n=1024)
    assert run("optimize", "--config", cfg) == 0
    rec = json.loads(capsys.readouterr().out)
    wm, J = BASE["omega_m"], BASE["J"]
    cold = wm / 2 + J - math.sqrt(J**2 + wm**2 / 4)
    assert abs(rec["result"]["x"] - cold) < 1e-6 * wm


def test_optimize_needs_dense_scan(tmp_path):
    cfg = write_config(tmp_path, **BASE, bounds=[-2, 2], n=100)
    assert run("optimize", "--config", cfg) == 2


def test_optimize_needs_bounds(tmp_path):
    assert run("optimize", "--config", write_config(tmp_path, **BASE)) == 2


def test_qnd_table(tmp_path):
    cfg = write_config(tmp_path, **BASE, n_max=2)
    assert run("qnd", "--config", cfg, "--grid", "0.1:2:5", "--out", tmp_path) == 0
    _, data = io.read_csv(tmp_path / "qnd.csv")
    assert set(data) == {"omega_m", "tau_meas", "ratio", "tau_ba_0", "tau_ba_1", "tau_ba_2"}
    np.testing.assert_allclose(data["ratio"], data["tau_meas"] / data["tau_ba_1"], rtol=1e-15)


def test_qnd_rejects_detuning_axis(tmp_path):
    cfg = write_config(tmp_path, **BASE, axis="delta")
    assert run("qnd", "--config", cfg, "--grid", "0:1:3", "--out", tmp_path) == 2


def test_cool_report(tmp_path):
    out = tmp_path / "cool.json"
    assert run("cool", "--config", CONFIGS / "cool.json", "--out", out) == 0
    rec = json.loads(out.read_text())
    assert rec["exact"]["n_eff"] == pytest.approx(rec["exact_at_delta_cold"]["n_eff"])
    assert abs(rec["difference"]["n_eff_relative"]) < 0.05


def test_jumps_all_regimes(tmp_path):
    assert run("jumps", "--config", CONFIGS / "jumps.json", "--out", tmp_path, "--seed", 3) == 0
    for name in ("none", "slow", "fast"):
        header, data = io.read_csv(tmp_path / f"jumps_{name}.csv")
        assert header["regime"] == name and header["run_config"]["seed"] == 3
        assert data["time"].size > 0


def test_jumps_reproducible(tmp_path):
    cfg = write_config(tmp_path, regime="fast")
    run("jumps", "--config", cfg, "--out", tmp_path / "a", "--seed", 5)
    run("jumps", "--config", cfg, "--out", tmp_path / "b", "--seed", 5)
    assert (tmp_path / "a" / "jumps_fast.csv").read_bytes() == (tmp_path / "b" / "jumps_fast.csv").read_bytes()


def test_jumps_zero_duration(tmp_path):
    cfg = write_config(tmp_path, regime="slow", duration=0)
    assert run("jumps", "--config", cfg, "--out", tmp_path) == 2


@pytest.mark.parametrize("grid", ["1:2:0", "nonsense"])
def test_bad_grid_exit_code(tmp_path, grid):
    cfg = write_config(tmp_path, **BASE)
    assert run("spectrum", "--config", cfg, "--grid", grid, "--out", tmp_path) == 2


def test_missing_and_invalid_configs(tmp_path):
    assert run("spectrum", "--config", tmp_path / "nope.json") == 2
    bad = write_config(tmp_path, **{**BASE, "kappa_L": -1.0})
    assert run("spectrum", "--config", bad, "--out", tmp_path) == 2
    assert run("cool") == 2


def _fake_checks(passed):
    def fake():
        return validation.Check("fake", "x", 0.0, 0.0, passed)

    return fake


@pytest.mark.parametrize("passed, code", [(True, 0), (False, 1)])
def test_validate_exit_code_follows_report(tmp_path, monkeypatch, passed, code):
    real = validation.run_all
    monkeypatch.setattr(validation, "run_all", lambda: real((_fake_checks(passed),)))
    out = tmp_path / "report.json"
    assert run("validate", "--out", out) == code
    report = json.loads(out.read_text())
    assert report["passed"] is passed
    assert report["checks"][0]["passed"] is passed


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path, **BASE)
    proc = subprocess.run([sys.executable, "-m", "mimnoise", "spectrum", "--config", str(cfg),
                           "--grid", "-1:1:3", "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "spectrum.csv").exists()
