import json
import subprocess
import sys

import pytest

from braidmf.cli import main


def run(*argv):
    lines = []
    code = main(list(argv), out=lines.append)
    return code, "\n".join(lines)


def test_braid_eq_exit_codes():
    assert run("braid", "eq", "--n", "3", "s1 s2 s1", "s2 s1 s2") == (0, "true")
    assert run("braid", "eq", "--n", "3", "s1 s2", "s2 s1") == (1, "false")
    assert run("braid", "eq", "--n", "2", "s1 D s1 D", "D s1 D s1")[0] == 0


def test_usage_errors_exit_2(capsys):
    assert run("braid", "eq", "--n", "3", "s1 s7", "s1")[0] == 2
    assert "s7" in capsys.readouterr().err
    assert run("trace", "table", "--n", "3", "--word", "s1")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == 2


def test_braid_json_shapes():
    code, out = run("braid", "jm", "--n", "3", "--i", "1")
    obj = json.loads(out)
    assert code == 0 and obj["n"] == 3 and [l["gen"] for l in obj["letters"]] == ["s1", "s2", "s2", "s1"]
    code, out = run("braid", "fgt", "--n", "2", "s1 D s1")
    assert [l["gen"] for l in json.loads(out)["letters"]] == ["s1", "s1"]
    code, out = run("braid", "cnt", "--n", "2", "--m", "1", "D")
    assert json.loads(out)["n"] == 3
    code, out = run("braid", "normalize", "--n", "3", "s1 s2 s1")
    assert json.loads(out)["delta_power"] == 1


def test_mf_roundtrip(tmp_path):
    code, out = run("phi", "eval", "--n", "2", "--word", "s1")
    assert code == 0
    p = tmp_path / "cplus.json"
    p.write_text(out)
    assert run("mf", "check", str(p))[0] == 0
    assert json.loads(run("mf", "equiv", str(p), str(p))[1])["equivalent"] is True
    code, out = run("phi", "eval", "--n", "2", "--word", "s1^-1")
    q = tmp_path / "cminus.json"
    q.write_text(out)
    assert run("mf", "equiv", str(p), str(q))[0] == 1
    obj = json.loads(p.read_text())
    obj["D"][0][1] = "x11"
    p.write_text(json.dumps(obj))
    assert run("mf", "check", str(p))[0] == 1


def test_phi_verify_reports():
    code, out = run("phi", "verify", "--identity", "inverse")
    assert code == 0 and json.loads(out)["verified"] is True
    code, out = run("phi", "verify", "--identity", "braid3", "--window", "8,8")
    assert code == 1 and "EngineError" in json.loads(out)["reason"]


def test_space_show():
    code, out = run("space", "show", "--kind", "reduced", "--n", "2")
    assert code == 0 and "potential" in out


def test_trace_markov_tables_identical():
    a = run("trace", "table", "--n", "2", "--word", "s1", "--qmax", "8", "--tmax", "8")
    b = run("trace", "table", "--n", "1", "--word", "", "--qmax", "8", "--tmax", "8")
    assert a[0] == b[0] == 0 and a[1] == b[1]
    assert a[1].splitlines()[0] == "k,parity,q,t,dim"


@pytest.mark.parametrize("check", ["markov", "twist", "conjugation"])
def test_trace_verify(check):
    code, out = run("trace", "verify", "--check", check, "--qmax", "8", "--tmax", "8")
    assert code == 0 and json.loads(out)["passed"]


def test_window_from_environment(monkeypatch):
    monkeypatch.setenv("BRAIDMF_QMAX", "4")
    monkeypatch.setenv("BRAIDMF_TMAX", "2")
    code, out = run("trace", "table", "--n", "1", "--word", "", "--format", "json")
    meta = json.loads(out)["meta"]
    assert (meta["qmax"], meta["tmax"]) == (4, 2)


def test_console_output_is_byte_identical():
    cmd = [sys.executable, "-m", "braidmf.cli", "trace", "table", "--n", "2", "--word", "s1 s1",
           "--qmax", "6", "--tmax", "6"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
