import subprocess
import sys

import pytest
import yaml

from qftbs.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main
from qftbs.config import EXPERIMENTS
from qftbs.io import read_csv, read_manifest

from conftest import small_config


def _write(tmp_path, experiment="green", name="cfg.yaml", **sections):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(small_config(experiment, **sections).to_dict()))
    return path


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_every_experiment_runs(tmp_path, experiment, capsys):
    cfg = _write(tmp_path, experiment)
    out = tmp_path / "run"
    assert main([experiment, "--config", str(cfg), "--out", str(out), "--steps", "40"]) == EXIT_OK
    manifest = read_manifest(out / "manifest.txt")
    assert manifest["status"] == "ok" and manifest["experiment"] == experiment
    assert manifest["config.solver.n_steps"] == "40"
    assert len(manifest["config_sha256"]) == 64
    for name in manifest["outputs"].split(", "):
        assert (out / name).stat().st_size > 0
    assert "outputs written to" in capsys.readouterr().out


def test_repeat_runs_are_bit_identical(tmp_path):
    cfg = _write(tmp_path, "schmidt")
    for run in ("a", "b"):
        assert main(["schmidt", "--config", str(cfg), "--out", str(tmp_path / run)]) == EXIT_OK
    names = [p.name for p in (tmp_path / "a").iterdir() if p.suffix in (".csv", ".json")]
    assert names
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_csv_outputs_readable(tmp_path):
    cfg = _write(tmp_path, "dispersion")
    main(["dispersion", "--config", str(cfg), "--out", str(tmp_path / "run")])
    cols, data = read_csv(tmp_path / "run" / "dispersion.csv")
    assert cols[0] == "wavelength_nm" and data.shape[1] == len(cols)


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: green\nmesh: {n_point: 10}\n")
    assert main(["green", "--config", str(bad)]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err
    assert main(["green", "--config", str(tmp_path / "none.yaml")]) == EXIT_CONFIG
    good = _write(tmp_path)
    assert main(["green", "--config", str(good), "--jobs", "0"]) == EXIT_CONFIG
    assert main(["green", "--config", str(good), "--steps", "0"]) == EXIT_CONFIG


def test_numerical_error_exit_3(tmp_path):
    # a 2 ps basis spans fewer than four samples of the 0.78 ps grid
    cfg = _write(tmp_path, "green", basis={"t_char_ps": 2})
    out = tmp_path / "run"
    assert main(["green", "--config", str(cfg), "--out", str(out)]) == EXIT_NUMERICAL
    assert "ResolutionError" in (out / "diagnostics.txt").read_text()
    assert read_manifest(out / "manifest.txt")["status"] == "numerical-error"


def test_argparse_errors_exit_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["teleport", "--config", "x.yaml"])
    assert exc.value.code == 2


def test_console_entry_point(tmp_path):
    cfg = _write(tmp_path, "dispersion")
    proc = subprocess.run([sys.executable, "-m", "qftbs.cli", "dispersion", "--config", str(cfg),
                           "--out", str(tmp_path / "run")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "zdw_nm" in proc.stdout
