import subprocess
import sys

import pytest

from steerkit import cli, formats


def run(*args):
    return cli.main([str(a) for a in args])


def test_precompute_convolve_chain(tmp_path):
    b1, b2 = tmp_path / "b1.stfb", tmp_path / "b2.stfb"
    w1, w2 = tmp_path / "w1.stwt", tmp_path / "w2.stwt"
    f, o1, o2 = tmp_path / "f.stfd", tmp_path / "o1.stfd", tmp_path / "o2.stfd"
    common = ["--dim", 2, "--cutoff", 2, "--radial", 2, "--angular", 8, "--radius", 1.5, "--interp", "linear"]
    assert run("precompute", *common, "--layer", "first", "--out", b1) == 0
    assert run("precompute", *common, "--layer", "higher", "--out", b2) == 0
    assert run("init-weights", "--filters", b1, "--channels", 2, "--out", w1) == 0
    assert run("init-weights", "--filters", b2, "--channels", 2, "--seed", 1, "--out", w2) == 0
    assert run("random-field", "--shape", "14,14", "--out", f) == 0
    assert run("convolve", "--filters", b1, "--weights", w1, "--input", f, "--out", o1) == 0
    assert run("convolve", "--filters", b2, "--weights", w2, "--input", o1, "--out", o2) == 0
    out = formats.read_field(o2)
    assert out.shape == (2, 2) and sorted(out.blocks) == [0, 1, 2] and out.channels() == 2


def test_convolve_rejects_mismatched_weights(tmp_path):
    b1, b3, w3 = tmp_path / "b1.stfb", tmp_path / "b3.stfb", tmp_path / "w3.stwt"
    run("precompute", "--dim", 2, "--cutoff", 1, "--radial", 1, "--angular", 8, "--radius", 1,
        "--interp", "linear", "--layer", "first", "--out", b1)
    run("precompute", "--dim", 3, "--cutoff", 1, "--radial", 1, "--angular", 4, "--radius", 1,
        "--interp", "linear", "--layer", "first", "--out", b3)
    run("init-weights", "--filters", b3, "--out", w3)
    run("random-field", "--shape", "8,8", "--out", tmp_path / "f.stfd")
    with pytest.raises(SystemExit):
        run("convolve", "--filters", b1, "--weights", w3, "--input", tmp_path / "f.stfd", "--out", tmp_path / "o")


def test_scan_and_rate(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text('{"cutoff": 1, "n_a": 8, "h": 1.0, "input_size": 8, "angle_count": 4, "interp": ["linear"]}')
    assert run("scan", "--config", cfg, "--out", tmp_path / "s.csv") == 0
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "angle_deg,axis,filter,seed,error" and len(lines) == 5
    rate_cfg = tmp_path / "r.json"
    rate_cfg.write_text('{"cutoff": 1, "h": 1.0, "input_size": 11, "mask": false, "interp": "linear,nearest"}')
    assert run("rate", "--config", rate_cfg, "--na", "8,16", "--out", tmp_path / "r.csv", "--summary") == 0
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == "n_a,filter,seed,error"
    assert '"slope"' in capsys.readouterr().out


def test_check_exit_codes(capsys):
    assert run("check", "--suite", "delta") == 0
    assert "PASS delta.identity" in capsys.readouterr().out


def test_bad_input_exit_code(tmp_path, capsys):
    assert run("scan", "--config", tmp_path / "missing.json", "--out", tmp_path / "x.csv") == 2
    assert "steerkit: error" in capsys.readouterr().err


def test_console_script():
    proc = subprocess.run(["steerkit", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "precompute" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "steerkit.cli", "check", "--suite", "cg"], capture_output=True, text=True)
    assert proc.returncode == 0
