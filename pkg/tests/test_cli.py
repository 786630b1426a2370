from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from quonforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def envelope(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_quon_verify(capsys):
    code, env = envelope(capsys, "quon", "verify", "--k", "4")
    assert code == 0 and env["pass"] and env["backend"] == "exact"
    assert env["command"] == "quon verify --k 4"
    assert set(env) == {"command", "backend", "wall_time", "pass", "result"}


def test_wh_verify_presets(capsys):
    assert envelope(capsys, "wh", "verify", "--k", "3", "--preset", "translational", "--params", "a=1,b=1")[0] == 0
    code, env = envelope(capsys, "wh", "verify", "--k", "2", "--preset", "calogero", "--params", "c=0.3")
    assert code == 1 and not env["pass"]
    code, _, err = run(capsys, "wh", "verify", "--k", "3", "--preset", "cyclic", "--params", "1,2")
    assert code == 2 and "cyclic" in err


def test_representability_exit(capsys):
    code, _, err = run(capsys, "wh", "verify", "--k", "2", "--preset", "translational", "--params", "a=-1,b=1")
    assert code == 2 and "representability" in err


def test_susy_spectrum(capsys, tmp_path):
    out = tmp_path / "levels.json"
    code, env = envelope(capsys, "susy", "spectrum", "--k", "3", "--preset", "const1", "--levels", "8", "--trunc", "30", "--out", str(out))
    assert code == 0
    levels = json.loads(out.read_text())
    assert [x["degeneracy"] for x in levels] == [1, 2, 3, 3, 3, 3, 3, 3]
    assert env["result"] == levels
    code, text, _ = run(capsys, "susy", "spectrum", "--k", "3", "--levels", "3", "--trunc", "20", "--csv")
    assert code == 0 and text.startswith("energy,degeneracy\n") and len(text.strip().split("\n")) == 4


def test_susy_truncation_exit(capsys):
    assert run(capsys, "susy", "spectrum", "--k", "3", "--levels", "40", "--trunc", "30")[0] == 2


def test_susy_verify(capsys):
    code, env = envelope(capsys, "susy", "verify", "--k", "2", "--trunc", "20")
    assert code == 0 and env["result"]["witten"]["passed"]
    code, env = envelope(capsys, "susy", "verify", "--k", "3", "--trunc", "20")
    assert code == 0 and env["result"]["closed_forms"]["passed"]


def test_su2_verify(capsys):
    code, env = envelope(capsys, "su2", "verify", "--k", "4", "--a", "1.7", "--r", "0.3")
    assert code == 0 and env["backend"] == "exact"
    assert env["result"]["a"] == "17/10"
    code, env = envelope(capsys, "su2", "verify", "--k", "4", "--a", "1.7", "--r", "0.3", "--backend", "float")
    assert code == 0 and env["backend"] == "float"


def test_pauli_order(capsys):
    code, env = envelope(capsys, "pauli", "order", "--d", "3")
    assert code == 0 and env["result"]["order"] == 27
    code, env = envelope(capsys, "pauli", "order", "--d", "3", "--cap", "10")
    assert code == 1 and not env["result"]["closed"]


def test_gauss(capsys):
    code, env = envelope(capsys, "gauss", "--u", "1", "--v", "-3", "--d", "3")
    assert code == 0 and env["result"]["abs_sq"] == "3"


def test_mub_roundtrip(capsys, tmp_path):
    out = tmp_path / "m.json"
    code, env = envelope(capsys, "mub", "gen", "--d", "5", "--backend", "exact", "--out", str(out))
    assert code == 0 and env["result"]["certificate"] == {"exact": True, "worst_deviation": 0.0, "pass": True, "pairs_checked": 465}
    code, env = envelope(capsys, "mub", "verify", "--in", str(out))
    assert code == 0 and env["result"]["embedding"]["pass"]


def test_mub_not_prime(capsys):
    code, out, err = run(capsys, "mub", "gen", "--d", "6")
    assert code == 2 and "not-prime" in err and out == ""


def test_mub_float_r(capsys):
    code, env = envelope(capsys, "mub", "gen", "--d", "3", "--r", "0.5", "--backend", "float")
    assert code == 0 and env["backend"] == "float"


def test_mub_csv(capsys):
    code, text, _ = run(capsys, "mub", "gen", "--d", "2", "--csv")
    assert code == 0 and text.startswith("a,alpha,b,beta,overlap_sq")


def test_env_backend(capsys, monkeypatch):
    monkeypatch.setenv("QUONFORGE_BACKEND", "float")
    code, env = envelope(capsys, "mub", "gen", "--d", "3")
    assert code == 0 and env["backend"] == "float"


def test_mub_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "mub", "gen", "--d", "7", "--backend", "exact", "--out", str(a))[0] == 0
    assert run(capsys, "mub", "gen", "--d", "7", "--backend", "exact", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_sic_verify(capsys, tmp_path):
    code, env = envelope(capsys, "sic", "verify", "--orbit")
    assert code == 0 and env["result"]["certificate"]["pass"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 2, "vectors": [[[1, 0], [0, 0]]] * 4}))
    code, env = envelope(capsys, "sic", "verify", "--in", str(bad))
    assert code == 1
    assert env["result"]["certificate"]["identity_residual"] == pytest.approx(1.0)
    fid = tmp_path / "fid.json"
    fid.write_text(json.dumps({"d": 2, "fiducial": [[1, 0], [0, 0]]}))
    assert run(capsys, "sic", "verify", "--in", str(fid), "--orbit")[0] == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["mub", "gen"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quonforge.cli", "gauss", "--u", "0", "--v", "0", "--d", "4"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["abs_sq"] == "16"
    assert np.isclose(json.loads(proc.stdout)["result"]["float"][0], 4)
