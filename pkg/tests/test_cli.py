import csv
import json

import pytest
import yaml

from quatsurf.cli.main import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main, resolve_threads
from quatsurf.connections.sweep import CSV_HEADER
from quatsurf.errors import ConfigInvalid

SMALL_GRID = {"x_min": -1.0, "x_max": 1.0, "nx": 16, "ny": 16}


def write_config(tmp_path, data, name="run.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def test_surface_command(tmp_path, capsys):
    config = write_config(
        tmp_path, {"surface": {"grid": SMALL_GRID, "derived": ["parallel", "dual"]}}
    )
    out = tmp_path / "out"
    assert main(["surface", "--config", str(config), "--out", str(out)]) == EXIT_OK
    printed = capsys.readouterr().out.split()
    assert str(out / "surface.obj") in printed
    assert str(out / "parallel.obj") in printed
    assert str(out / "dual.obj") in printed
    report = json.loads((out / "diagnostics.json").read_text(encoding="utf-8"))
    assert set(report) == {"surface", "gauss", "parallel", "dual"}


def test_darboux_command(tmp_path):
    config = write_config(
        tmp_path,
        {
            "surface": {"grid": SMALL_GRID},
            "pipeline": [
                {"kind": "rho", "spectral": [0.3, 0.2], "cmc": True, "name": "bubble"},
                {"kind": "mu", "spectral": "exp(4*I/5)"},
            ],
        },
    )
    out = tmp_path / "out"
    assert main(["darboux", "--config", str(config), "--out", str(out)]) == EXIT_OK
    assert (out / "bubble.obj").exists()
    assert (out / "step01_mu.obj").exists()
    report = json.loads((out / "diagnostics.json").read_text(encoding="utf-8"))
    assert [step["kind"] for step in report["steps"]] == ["rho", "mu"]
    assert report["steps"][0]["residuals"]["riccati"] < 1e-8


def test_invalid_config_exits_2(tmp_path, capsys):
    config = write_config(tmp_path, {"surface": {"kind": "torus"}})
    assert main(["surface", "--config", str(config)]) == EXIT_CONFIG
    assert "surface/kind" in capsys.readouterr().err


def test_missing_config_exits_3(tmp_path):
    assert main(["surface", "--config", str(tmp_path / "absent.yaml")]) == EXIT_NUMERICAL


def test_round_sphere_parallel_exits_3(tmp_path, capsys):
    config = write_config(
        tmp_path, {"surface": {"kind": "sphere", "grid": SMALL_GRID, "derived": ["parallel"]}}
    )
    code = main(["surface", "--config", str(config), "--out", str(tmp_path / "out")])
    assert code == EXIT_NUMERICAL
    assert "RoundSphere" in capsys.readouterr().err


def test_empty_sweep_writes_header(tmp_path):
    config = write_config(
        tmp_path, {"surface": {"grid": SMALL_GRID}, "sweep": {"n_re": 4, "n_im": 0}}
    )
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(config), "--out", str(out), "--threads", "1"]) == 0
    with open(out / "sweep.csv", newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows == [CSV_HEADER]


def test_small_sweep(tmp_path):
    config = write_config(
        tmp_path,
        {
            "surface": {"grid": SMALL_GRID},
            "sweep": {"re_min": -2.0, "re_max": 0.5, "n_re": 2, "im_min": 0.5, "n_im": 1},
            "transport": {"substeps": 32},
        },
    )
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(config), "--out", str(out), "--threads", "2"]) == 0
    with open(out / "sweep.csv", newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    assert [float(r["re_rho"]) for r in rows] == [-2.0, 0.5]
    assert all(float(r["im_rho"]) == 0.5 for r in rows)


def test_invariants_command(tmp_path):
    config = write_config(
        tmp_path,
        {
            "surface": {"grid": SMALL_GRID},
            "invariants": {
                "spectral_points": [[0.3, 0.2], [-2.0, 0.5], [0.7, -0.4]],
                "levels": [16, 32],
                "random_samples": 20,
            },
            "transport": {"substeps": 32},
        },
    )
    out = tmp_path / "out"
    assert main(["invariants", "--config", str(config), "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "invariants.json").read_text(encoding="utf-8"))
    assert {"surface", "dual_gauge", "checks", "passed", "schema_digest"} <= set(report)
    assert all({"name", "passed"} <= set(check) for check in report["checks"])
    assert report["passed"] is True, [c for c in report["checks"] if not c["passed"]]
    names = {check["name"] for check in report["checks"]}
    assert {"flatness.conformal[2]", "multipliers[2]", "negative_control.corrupted_dual"} <= names


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("QUATSURF_THREADS", raising=False)
    assert resolve_threads(3) == 3
    assert resolve_threads(None) >= 1
    monkeypatch.setenv("QUATSURF_THREADS", "5")
    assert resolve_threads(None) == 5
    assert resolve_threads(2) == 2


@pytest.mark.parametrize("env, flag", [("zero", None), ("0", None), (None, 0)])
def test_resolve_threads_rejects(monkeypatch, env, flag):
    if env is None:
        monkeypatch.delenv("QUATSURF_THREADS", raising=False)
    else:
        monkeypatch.setenv("QUATSURF_THREADS", env)
    with pytest.raises(ConfigInvalid):
        resolve_threads(flag)


def test_bad_threads_exit_2(tmp_path, monkeypatch):
    monkeypatch.setenv("QUATSURF_THREADS", "many")
    config = write_config(tmp_path, {"surface": {"grid": SMALL_GRID}})
    assert main(["surface", "--config", str(config), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
