import json

import numpy as np
import pytest

from artifact.cli import main


def _write(path, text):
    path.write_text(text)
    return str(path)


SIM = """[states]
left_rho = 1
left_v1 = -0.5
right_rho = 1
right_v1 = 0.5
[grid]
nx1 = {nx1}
nx2 = {nx2}
[run]
t_end = 0.3
output_times = 0.1 0.2 0.3
[perturbation]
epsilon = {eps}
"""


def test_solve1d_region_iv(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["solve1d", "--left", "1,-0.2", "--right", "1,0.2", "--out", str(out)]) == 0
    rep = json.loads((out / "fan.json").read_text())
    assert rep["region"] == "IV"
    assert rep["middle"]["rho"] == pytest.approx(0.81, abs=1e-12)
    assert rep["middle"]["v1"] == pytest.approx(0.0, abs=1e-12)
    assert (out / "config_echo.ini").exists()


def test_solve1d_degenerate_and_profile(tmp_path):
    out = tmp_path / "s"
    assert main(["solve1d", "--left", "1,0.2", "--right", "1,0.2", "--profile-t", "0.5", "--out", str(out)]) == 0
    rep = json.loads((out / "fan.json").read_text())
    assert rep["region"] == "degenerate"
    assert all(w["strength"] == 0.0 for w in rep["waves"])
    prof = np.loadtxt(out / "profile.csv", delimiter=",", skiprows=1)
    assert np.all(prof[:, 1] == 1.0)


def test_solve1d_from_config(tmp_path):
    cfg = _write(tmp_path / "c.ini", "[gas]\ngamma = 2\nk0 = 0.5\n[states]\nleft_rho = 1\nleft_v1 = -0.2\nright_rho = 1\nright_v1 = 0.2\n")
    assert main(["solve1d", "--config", cfg, "--out", str(tmp_path / "o")]) == 0


def test_usage_errors(tmp_path, capsys):
    assert main(["solve1d", "--left", "1,0.2", "--out", str(tmp_path / "o")]) == 2
    assert main(["nonsense"]) == 2
    assert main([]) == 2
    assert main(["simulate2d", "--config", str(tmp_path / "missing.ini")]) == 2
    bad = _write(tmp_path / "bad.ini", "[grid]\nnx1 = many\n")
    assert main(["simulate2d", "--config", bad, "--out", str(tmp_path / "o")]) == 2


def test_vacuum_is_model_error(tmp_path):
    assert main(["solve1d", "--left", "1,-3", "--right", "1,3", "--out", str(tmp_path / "o")]) == 1


def test_output_dir_precedence(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = _write(tmp_path / "c.ini", "[output]\ndir = from_config\n")
    args = ["solve1d", "--left", "1,-0.2", "--right", "1,0.2", "--config", cfg]
    assert main(args) == 0
    assert (tmp_path / "from_config" / "fan.json").exists()
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "from_env"))
    assert main(args) == 0
    assert (tmp_path / "from_env" / "fan.json").exists()
    assert main(args + ["--out", str(tmp_path / "from_flag")]) == 0
    assert (tmp_path / "from_flag" / "fan.json").exists()


def test_simulate2d_plane_symmetry(tmp_path):
    cfg = _write(tmp_path / "c.ini", SIM.format(nx1=80, nx2=6, eps=0.0))
    out = tmp_path / "r"
    assert main(["simulate2d", "--config", cfg, "--out", str(out)]) == 0
    summ = json.loads((out / "summary.json").read_text())
    assert summ["max_plane_asymmetry"] < 1e-12
    assert summ["failure"] is None
    for name in ("slice_t0.1.csv", "slice_t0.2.csv", "slice_t0.3.csv", "fronts.csv", "entropy.json", "plot.gp", "config_echo.ini"):
        assert (out / name).exists()
    head = (out / "slice_t0.3.csv").read_text().splitlines()[0]
    assert head == "x1,x2,rho,v1,v2"


def test_simulate2d_four_fronts_and_determinism(tmp_path):
    cfg = _write(tmp_path / "c.ini", SIM.format(nx1=120, nx2=8, eps=0.01))
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate2d", "--config", cfg, "--out", str(a), "--threads", "1", "--seed", "4"]) == 0
    assert main(["simulate2d", "--config", cfg, "--out", str(b), "--threads", "3", "--seed", "4"]) == 0
    fr = np.loadtxt(a / "fronts.csv", delimiter=",", skiprows=1)
    assert fr.shape[1] == 7
    assert np.all(np.isfinite(fr[:, 2:6]))
    assert np.all(fr[:, 6] == 1.0)
    for p in a.iterdir():
        if p.name != "timings.txt":
            assert p.read_bytes() == (b / p.name).read_bytes(), p.name
    # the echo reproduces the run
    c = tmp_path / "c2"
    assert main(["simulate2d", "--config", str(a / "config_echo.ini"), "--out", str(c)]) == 0
    assert (c / "slice_t0.3.csv").read_bytes() == (a / "slice_t0.3.csv").read_bytes()


def test_build_data_constant_background(tmp_path):
    cfg = _write(tmp_path / "c.ini", "[states]\nright_rho = 1\nright_v1 = 0.2\n[data]\ndelta = 0.05\nn_theta = 16\n")
    out = tmp_path / "d"
    assert main(["build-data", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "ansatz.json").read_text())
    assert all(abs(i["constant"]) <= 1e-9 for i in rep["items"])
    assert (out / "sigma_delta.csv").exists()


def test_trace_fronts_matches_rays(tmp_path):
    cfg = _write(tmp_path / "c.ini", "[states]\nright_rho = 1\nright_v1 = 0.5\n[fronts]\nu0 = 0.3\nn_rays = 8\n")
    out = tmp_path / "f"
    assert main(["trace-fronts", "--config", cfg, "--out", str(out)]) == 0
    a = np.loadtxt(out / "front.csv", delimiter=",", skiprows=1)
    # the ray surface x1/t = v1_r + c_r - u0
    assert np.max(np.abs(a[:, 4] - (1.5 - 0.3) * a[:, 1])) < 1e-8
    assert np.max(np.abs(a[:, 6])) < 1e-8


def test_verify_entropy_self_comparison(tmp_path):
    cfg = _write(tmp_path / "c.ini", SIM.format(nx1=60, nx2=4, eps=0.01))
    out = tmp_path / "v"
    assert main(["verify-entropy", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads((out / "entropy.json").read_text())
    assert rep["integral_alpha"][0] == 0.0
    assert all(a == 0.0 for a in rep["integral_alpha"])
