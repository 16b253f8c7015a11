import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qpelastic.cli import main

BASE_CONFIG = {
    "medium": {"lambda": 2.0, "mu": 1.0, "rho": 1.0, "omega": 5.0},
    "quasi_momentum": {"alpha": 0.3},
    "geometry": "qp2d",
    "eval": {"source": [0.0, 0.0], "points": [[0.25, 1.0], [0.5, 0.8]]},
    "solver": {"N": 64},
    "incident": {"kind": "plane_p", "theta": 0.25},
    "verify": {"trials": 2},
}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_eval_deterministic(tmp_path):
    cfg = write_cfg(tmp_path, BASE_CONFIG)
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert main(["eval", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["eval", "--config", cfg, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().splitlines()
    assert lines[0].startswith("# config:")
    assert lines[1].split(",")[:2] == ["x1", "x2"]
    assert len(lines) == 4


def test_eval_missing_field_exit2(tmp_path, capsys):
    cfg = dict(BASE_CONFIG)
    cfg["medium"] = {"lambda": 2.0, "omega": 1.0}  # mu missing
    p = write_cfg(tmp_path, cfg)
    rc = main(["eval", "--config", p, "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "medium.mu" in capsys.readouterr().err


def test_eval_wood_anomaly_exit3(tmp_path):
    cfg = json.loads(json.dumps(BASE_CONFIG))
    cfg["medium"]["omega"] = 1.0
    cfg["quasi_momentum"]["alpha"] = 0.5  # alpha == k_p
    p = write_cfg(tmp_path, cfg)
    assert main(["eval", "--config", p, "--out", str(tmp_path / "x.csv")]) == 3


def test_eval_3d_geometries(tmp_path):
    cfg = json.loads(json.dumps(BASE_CONFIG))
    cfg["geometry"] = "qp3d"
    cfg["eval"] = {"source": [0, 0, 0], "points": [[0.3, 0.7, 0.6]]}
    p = write_cfg(tmp_path, cfg)
    out = tmp_path / "g3.csv"
    assert main(["eval", "--config", p, "--out", str(out)]) == 0
    assert "re_G33" in out.read_text().splitlines()[1]

    cfg["geometry"] = "biqp3d"
    cfg["quasi_momentum"] = {"alpha": [0.3, 0.45]}
    cfg["eval"] = {"source": [0, 0, 0], "points": [[0.3, 0.2, 0.9]]}
    p = write_cfg(tmp_path, cfg, "cfg2.json")
    assert main(["eval", "--config", p, "--out", str(tmp_path / "g3b.csv")]) == 0


@pytest.mark.parametrize("suite", ["quasiperiodicity", "reciprocity", "specfun",
                                   "ode_jump", "pde_residual", "oracle"])
def test_verify_suites_pass(tmp_path, suite):
    p = write_cfg(tmp_path, BASE_CONFIG)
    out = tmp_path / "report.json"
    rc = main(["verify", "--config", p, "--suite", suite, "--out", str(out), "--seed", "3"])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["pass"] is True
    assert rep["seed"] == 3
    assert rep["worst"] <= rep["tolerance"]


def test_solve2d_report(tmp_path):
    cfg = json.loads(json.dumps(BASE_CONFIG))
    cfg["profile"] = {"height": 0.0, "cos": [], "sin": [0.1]}
    p = write_cfg(tmp_path, cfg)
    out = tmp_path / "sol.json"
    assert main(["solve2d", "--config", p, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["boundary_residual"] < 1e-5
    assert rep["energy"]["balance"] < 1e-3
    assert len(rep["density"]) == 2 * 64
    assert rep["config"]["profile"]["sin"] == [0.1]


def test_rayleigh_roundtrip_via_cli(tmp_path):
    cfg = json.loads(json.dumps(BASE_CONFIG))
    cfg["profile"] = {"height": 0.0, "cos": [], "sin": [0.1]}
    cfg["rayleigh"] = {"height": 0.6, "m_modes": 4}
    p = write_cfg(tmp_path, cfg)
    coef = tmp_path / "coef.json"
    assert main(["rayleigh", "extract", "--config", p, "--out", str(coef)]) == 0
    data = json.loads(coef.read_text())
    assert len(data["p"]) == 9

    cfg2 = json.loads(json.dumps(BASE_CONFIG))
    cfg2["rayleigh"] = {
        "coeffs": {"p": data["p"], "s": data["s"]},
        "points": [[0.1, 0.8], [0.4, 0.9]],
    }
    p2 = write_cfg(tmp_path, cfg2, "cfg_eval.json")
    out = tmp_path / "field.csv"
    assert main(["rayleigh", "eval", "--config", p2, "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 4


def test_phaseless_synth_and_check(tmp_path):
    cfg = json.loads(json.dumps(BASE_CONFIG))
    cfg["profile"] = {"height": 0.0, "cos": [], "sin": [0.1]}
    cfg["phaseless"] = {
        "z_tilde": [0.35, 0.45],
        "fixed_pol": [1.0, 0.0],
        "movable_pols": [[0.0, 1.0]],
        "probes": [[1.0, 0.0], [0.0, 1.0]],
        "sigma_center": [0.5, 0.75],
        "sigma_axes": [0.2, 0.08],
        "n_sources": 2,
        "grid_x1": [0.1, 0.35, 0.6, 0.85],
        "height": 1.1,
        "solver_n": 32,
    }
    p = write_cfg(tmp_path, cfg)
    ds_path = tmp_path / "ds.json"
    assert main(["phaseless", "synth", "--config", p, "--out", str(ds_path)]) == 0
    data = json.loads(ds_path.read_text())
    key = next(iter(data["datasets"]))
    assert np.asarray(data["datasets"][key]["r"]).shape == (2, 4)

    cfg["phaseless"]["reference"] = str(ds_path)
    p2 = write_cfg(tmp_path, cfg, "cfg_check.json")
    rep_path = tmp_path / "rep.json"
    assert main(["phaseless", "check", "--config", p2, "--out", str(rep_path)]) == 0
    rep = json.loads(rep_path.read_text())
    assert rep["worst_cosine_discrepancy"] == 0.0


def test_console_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, BASE_CONFIG)
    out = tmp_path / "c.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "qpelastic.cli", "eval", "--config", cfg, "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert out.exists()
