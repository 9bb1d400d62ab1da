from __future__ import annotations

import json
import subprocess
import sys

import pytest

from gl3k.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def records(out):
    lines = out.splitlines()
    assert json.loads(lines[0]) == {"schema": 1}
    return [json.loads(x) for x in lines[1:]]


def test_sum_trivial(capsys):
    code, out, _ = run(capsys, "sum", "--d1", "1", "--d2", "1", "--m", "1", "--n", "1")
    assert code == 0
    (rec,) = records(out)
    assert rec["value"]["re"] == 1.0 and rec["value"]["rational"] == "1"


def test_sum_matches_library(capsys):
    from gl3k.gl3 import s_long_bruteforce

    code, out, _ = run(capsys, "sum", "--m", "3", "--n", "2", "--d1", "6", "--d2", "4", "--mode", "exact")
    (rec,) = records(out)
    z = s_long_bruteforce(1, 3, 2, 1, 6, 4).to_complex()
    assert code == 0 and rec["value"]["re"] == pytest.approx(z.real) and rec["value"]["im"] == pytest.approx(z.imag)


def test_verify_sweep(capsys):
    code, out, err = run(capsys, "verify", "--dmax", "12", "--mn", "1,2,3,4,6,12")
    recs = records(out)
    assert code == 0 and recs[-1]["mismatches"] == 0 and recs[-1]["cases"] == 144 * 36
    assert "seconds" not in recs[-1] and "verify:" in err


def test_verify_deterministic_and_workers(capsys):
    argv = ["verify", "--pairs", "4:8,9:27,6:10", "--mn", "1,2", "--records"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    c = run(capsys, *argv, "--workers", "3")[1]
    assert a == b == c


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--m", "1", "--n", "1", "--d1", "7", "--d2", "7", "--tuples")
    recs = records(out)
    assert code == 0 and sum(r["kind"] == "tuple" for r in recs) == 3
    assert recs[-1]["value"]["re"] == 8.0 and recs[-1]["bruteforce_terms"] == 343


def test_bilinear_csv_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "bilinear", "--x", "3,4", "--N", "3", "--format", "csv", "--seed", "9")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "# schema: 1" and lines[1].startswith("x1,x2,n,")
    assert len(lines) == 4
    path = tmp_path / "o.jsonl"
    code, out, _ = run(capsys, "bilinear", "--x", "3,4", "--N", "3", "--seed", "9", "--output", str(path))
    assert code == 0 and out == ""
    recs = records(path.read_text())
    assert [r["X1"] for r in recs] == [3, 4]


def test_float_mode_workers_value_equal(capsys, monkeypatch):
    a = records(run(capsys, "bilinear", "--x", "6", "--N", "4", "--mode", "float")[1])
    monkeypatch.setenv("GL3K_THREADS", "2")
    b = records(run(capsys, "bilinear", "--x", "6", "--N", "4", "--mode", "float")[1])
    assert a[0]["S_value"] == pytest.approx(b[0]["S_value"], rel=1e-10)


def test_hybrid_kernel_volume(capsys):
    code, out, _ = run(capsys, "hybrid", "--x1", "3", "--x2", "3", "--N", "3", "--t1", "0,1", "--t2", "0")
    assert code == 0 and records(out)[0]["T1"] == 1.0
    code, out, _ = run(capsys, "kernel", "--which", "J5", "--y1", "1", "--y2", "1", "--t1", "0.5", "--t2", "0")
    (rec,) = records(out)
    assert code == 0 and set(rec) >= {"which", "y1", "y2", "mu", "value_re", "value_im", "est_error", "converged"}
    code, out, _ = run(capsys, "volume", "--T", "4,8")
    recs = records(out)
    assert code == 0 and recs[-1]["kind"] == "volume_slope"


@pytest.mark.parametrize("argv", [
    ["sum", "--d1", "0", "--d2", "1"],
    ["sum", "--d1", "2"],
    ["verify", "--dmax", "3", "--pairs", "1:1"],
    ["kernel", "--which", "J5", "--y1", "100", "--y2", "1", "--t1", "0", "--t2", "0"],
    ["sum", "--d1", "2", "--d2", "2", "--format", "csv"],
])
def test_invalid_input_exit_2(capsys, tmp_path, argv):
    path = tmp_path / "never.json"
    try:
        code = main(argv + ["--output", str(path)])
    except SystemExit as e:
        code = e.code
    assert code == 2
    assert not path.exists() and list(tmp_path.iterdir()) == []


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("GL3K_THREADS", "zero")
    assert run(capsys, "verify", "--dmax", "2")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "gl3k", "sum", "--d1", "5", "--d2", "5"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout.splitlines()[1])["value"]["rational"] == "6"
