import csv
import json
import os
import subprocess
import sys

import pytest

from dsmreg import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cond_hilbert(capsys):
    code, out, _ = run(["cond-hilbert", "--n", "20,40"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,cond"
    assert float(lines[2].split(",")[1]) == pytest.approx(7.7e58, rel=0.05)


def test_gen_then_solve(tmp_path, capsys):
    inst = tmp_path / "h.json"
    code, out, _ = run(["gen", "--family", "hilbert", "--n", "30", "--seeds", "4", "--out", str(inst)], capsys)
    assert code == 0 and out.strip() == str(inst)
    data = json.loads(inst.read_text())
    assert data["n"] == 30 and data["seed"] == 4

    prof = tmp_path / "prof.csv"
    code, out, _ = run(["solve", str(inst), "--method", "dsm", "--profile-out", str(prof)], capsys)
    report = json.loads(out)
    assert code == 0
    assert report["status"] == "converged-in-band"
    assert 0.9 * report["delta"] <= report["residual"] <= 1.001 * report["delta"]
    with open(prof, newline="") as fh:
        assert next(csv.reader(fh)) == ["index", "t", "y_exact", "u_dsm"]

    code, out, _ = run(["solve", str(inst), "--method", "vr-i", "--include-a0-cost"], capsys)
    report = json.loads(out)
    assert report["n_linsol"] == report["a0_solves"] + 1


def test_bench_with_config(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("family = deriv2\ncase = 3\nn = 10,20\nseeds = 0-1\nmethods = dsm,vr-i,vr-n\n")
    code, out, _ = run(["bench", "--config", str(cfg), "--out", str(tmp_path), "--name", "d2", "--profiles"], capsys)
    assert code == 0
    rows = (tmp_path / "d2.csv").read_text().splitlines()
    assert len(rows) == 1 + 2 * 2 * 3
    assert (tmp_path / "profile_deriv2-case3_n10_s0.csv").exists()
    assert "N_linsol" in out


def test_bench_flag_overrides(tmp_path, capsys):
    code, _, _ = run(
        ["bench", "--family", "heat", "--n", "10", "--seeds", "0", "--methods", "dsm,dsm-dopri",
         "--out", str(tmp_path), "--name", "h", "--audit"],
        capsys,
    )  # fmt: skip
    assert code == 0
    text = (tmp_path / "h.csv").read_text()
    assert "dsm-dopri" in text and "heat" in text


def test_bench_failed_rows_exit_code(tmp_path, capsys, monkeypatch):
    from dsmreg import bench, regularization

    def boom(*args, **kwargs):
        raise regularization.ParameterError(1e-9)

    monkeypatch.setattr(bench.dsm, "dsm_solve", boom)
    code, _, _ = run(["bench", "--n", "10", "--methods", "dsm,vr-i", "--out", str(tmp_path)], capsys)
    assert code == 1
    text = (tmp_path / "hilbert_sqrt_d0.01.csv").read_text()
    assert text.count("failed") == 1


def test_errors_exit_2(tmp_path, capsys):
    code, _, err = run(["solve", str(tmp_path / "missing.json")], capsys)
    assert code == 2 and "dsmreg: error" in err
    code, _, err = run(["bench", "--n", "10", "--delta-rel", "-1", "--out", str(tmp_path)], capsys)
    assert code == 2


def test_bad_arguments_exit_usage(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["bench", "--family", "wave"])
    assert info.value.code == 2


def test_numpy_backend_subprocess(tmp_path):
    env = dict(os.environ, DSMREG_DISABLE_JIT="1")
    cmd = [sys.executable, "-m", "dsmreg.cli", "bench", "--n", "10", "--seeds", "0", "--out", str(tmp_path)]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    probe = subprocess.run(
        [sys.executable, "-c", "from dsmreg import _jit; print(_jit.backend())"],
        env=env, capture_output=True, text=True, timeout=60,
    )  # fmt: skip
    assert probe.stdout.strip() == "numpy"
