import io
import json
import subprocess
import sys

import pytest

from cycloek.cli import CACHE_VERSION, RunConfig, fixed, main


def run(*argv):
    buf = io.StringIO()
    rc = main(list(argv), out=buf)
    return rc, buf.getvalue()


def test_ek_text():
    rc, out = run("ek", "3")
    assert rc == 0
    assert out.splitlines()[0] == "0.945497280871681"
    assert any(line.startswith("# g=") for line in out.splitlines())


def test_scalar_commands():
    assert run("ratio", "71", "--pmax", "500000")[1].splitlines()[0].startswith("0.49765")
    assert run("census", "3", "10")[1].strip() == "8"
    assert run("census", "3", "--x", "10")[1].strip() == "8"
    assert run("greedy", "--count", "10")[1].strip() == "0 2 6 8 12 18 20 26 30 32"
    assert run("greedy", "--target-sum", "2")[1].strip() == "i0=2089 a=18932"
    out = run("scan", "964477000", "964478000", "60", "1.0")[1]
    assert out.startswith("964477901 score=")
    assert "witnesses=2,6,8,12,18,20,26,30,36,56" in out
    rc, out = run("compare", "3", "100000")
    assert rc == 0 and "verdict=RamanujanCloser" in out


def test_exit_codes(capsys):
    rc, _ = run("ek", "2")
    assert rc == 1
    assert "q must be an odd prime" in capsys.readouterr().err
    assert run("ek")[0] == 1
    assert run("nosuch")[0] == 1
    assert run("ek", "3", "--format", "xml")[0] == 1
    assert run("sq", "3", "--pmax", "1")[0] == 1
    # refusals are computation errors
    assert run("census", "3", "100000000000")[0] == 2
    assert run("ekest", "3", "1000000000")[0] == 2
    assert run("greedy", "--count", "1000000")[0] == 2


def test_table_csv_and_json():
    rc, out = run("table", "13", "--format", "csv", "--pmax", "500000")
    lines = out.splitlines()
    assert rc == 0
    assert lines[0] == "q,S_q,qS_q,gamma_q,gamma_q_over_log_q,ratio"
    assert len(lines) == 6
    assert lines[1] == "3,0.351647,1.054940,0.945497,0.860629,1.247180"
    assert "\r" not in out
    rc, out = run("table", "13", "--format", "json")
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["q"] for r in rows] == [3, 5, 7, 11, 13]
    assert set(rows[0]) == {"q", "S_q", "qS_q", "gamma_q", "gamma_q_over_log_q", "ratio", "diagnostics"}
    assert rows[0]["diagnostics"]["pmax"] == 10**6


def test_json_round_trip():
    _, out = run("ek", "5", "--format", "json")
    obj = json.loads(out)
    assert abs(obj["gamma_q"] - 1.720624) < 1e-6
    assert "g" in obj["diagnostics"]


def test_fixed_formatting():
    assert fixed(0.0005, 3) in ("0.001", "0.000")
    assert fixed(-1.5, 2) == "-1.50"
    assert fixed(2.0, 0) == "2"


def test_cache(tmp_path):
    d = str(tmp_path)
    a = run("table", "23", "--cache", d, "--pmax", "100000")[1]
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["q11.txt", "q13.txt", "q17.txt", "q19.txt", "q23.txt", "q3.txt", "q5.txt", "q7.txt"]
    text = (tmp_path / "q3.txt").read_text()
    assert f"version={CACHE_VERSION}" in text
    b = run("table", "23", "--cache", d, "--pmax", "100000")[1]
    assert a == b
    # a different configuration must not read the old entries
    c = run("table", "23", "--cache", d, "--pmax", "200000", "--places", "9")[1]
    d2 = run("table", "23", "--pmax", "200000", "--places", "9")[1]
    assert c == d2
    # corrupted entries are recomputed
    (tmp_path / "q5.txt").write_text("garbage")
    assert run("table", "23", "--cache", d, "--pmax", "200000", "--places", "9")[1] == d2


def test_config_digest():
    a = RunConfig("high", None, None, "text", None, 1, None)
    b = RunConfig("high", 500000, None, "text", None, 1, None)
    c = RunConfig("high", None, None, "csv", "/tmp", 4, 3)
    assert a.digest() != b.digest()
    assert a.digest() == c.digest()


def test_threads_keep_order():
    one = run("table", "40", "--format", "csv")[1]
    two = run("table", "40", "--format", "csv", "--threads", "2")[1]
    assert one == two


def test_console_entry_and_rerun_identical():
    cmd = [sys.executable, "-m", "cycloek", "table", "31", "--format", "csv"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.startswith(b"q,S_q")
    r = subprocess.run([sys.executable, "-m", "cycloek", "ek", "9"], capture_output=True)
    assert r.returncode == 1
