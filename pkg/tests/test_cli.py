import json
import subprocess
import sys

import pytest

from urm.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


JSON_FIELDS = {"command", "d", "params", "counts", "max_residual", "elapsed_ms", "pass"}


def test_verify_mub_json(capsys):
    code, out, _ = run_cli(capsys, "verify-mub", "--d", "7", "--json")
    assert code == 0
    rep = json.loads(out)
    assert JSON_FIELDS <= rep.keys()
    assert rep["pass"] is True
    assert rep["details"]["max_deviation"] < 1e-9


def test_verify_mub_rejects_composite(capsys):
    code, out, err = run_cli(capsys, "verify-mub", "--d", "4")
    assert code == 2
    assert "d must be an odd prime" in err
    assert out == ""


def test_verify_mub_tolerance_tighter_than_precision(capsys):
    # observed max residual at d=3 is ~4e-16: below 1e-15, above 1e-17
    code, out, _ = run_cli(capsys, "verify-mub", "--d", "3", "--tolerance", "1e-17", "--json")
    assert code == 1
    assert json.loads(out)["max_residual"] > 1e-17
    code, out, _ = run_cli(capsys, "verify-mub", "--d", "3", "--tolerance", "1e-15", "--json")
    assert json.loads(out)["max_residual"] < 1e-15
    assert code == 0


def test_verify_mes(capsys):
    code, out, _ = run_cli(capsys, "verify-mes", "--d", "5", "--json")
    assert code == 0
    rep = json.loads(out)
    assert set(rep["details"]) == {"a", "b", "cross"}
    assert rep["details"]["cross"]["expected"] == pytest.approx(1 / 25)
    assert rep["details"]["cross"]["mean_squared_overlap"] == pytest.approx(1 / 25)


def test_verify_mes_text_lists_families(capsys):
    code, out, _ = run_cli(capsys, "verify-mes", "--d", "3")
    assert code == 0
    assert "family A" in out and "family B" in out and "1/d^2" in out


def test_verify_mes_rejects_two(capsys):
    assert run_cli(capsys, "verify-mes", "--d", "2")[0] == 2


def test_run_family_a_transcript(capsys):
    code, out, _ = run_cli(capsys, "run", "--d", "3", "--family", "a", "--seed", "42")
    assert code == 0
    assert "wrong=0" in out
    code2, out2, _ = run_cli(capsys, "run", "--d", "3", "--family", "a", "--seed", "42")
    assert out == out2 and code2 == code


def test_run_family_b_recovers_m(capsys):
    code, out, _ = run_cli(capsys, "run", "--d", "5", "--family", "b", "--b", "3", "--seed", "7", "--json")
    assert code == 0
    ep = json.loads(out)["details"]["episodes"][0]
    assert ep["hidden_b"] == "3"
    assert ep["status"] == "correct"
    assert ep["inference"].startswith(f"m={ep['hidden_m']} ")


def test_run_many_trials_never_wrong(capsys):
    for fam in "ab":
        code, out, _ = run_cli(capsys, "run", "--d", "7", "--family", fam, "--seed", "3",
                               "--trials", "300", "--json")
        rep = json.loads(out)
        assert code == 0
        assert rep["counts"]["wrong"] == 0
        assert rep["counts"]["trials"] == 300


def test_run_explicit_record(capsys):
    code, out, _ = run_cli(capsys, "run", "--d", "3", "--b", "comp", "--m", "2", "--prepared", "1,1",
                           "--seed", "0")
    assert code == 0
    assert "hidden b=comp m=2" in out


def test_run_usage_errors(capsys):
    assert run_cli(capsys, "run", "--d", "3")[0] == 2
    assert run_cli(capsys, "run", "--d", "3", "--seed", "1", "--m", "1")[0] == 2
    assert run_cli(capsys, "run", "--d", "3", "--seed", "1", "--b", "7")[0] == 2
    assert run_cli(capsys, "run", "--d", "3", "--seed", "1", "--trials", "0")[0] == 2
    assert run_cli(capsys, "run", "--d", "3", "--seed", "1", "--prepared", "x")[0] == 2
    assert run_cli(capsys, "run", "--d", "3", "--seed", "1", "--family", "c")[0] == 2


def test_sweep_a(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--d", "3", "--family", "a", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["counts"] == {"cases_total": 108, "support_total": 324, "correct_definite": 216,
                             "undetermined": 108, "wrong_definite": 0, "constraint_violations": 0}


def test_sweep_both_families_csv(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--d", "3", "--csv")
    header, row = out.strip().splitlines()
    assert header.startswith("command,d,pass")
    assert row.startswith("sweep,3,True")
    assert code == 0


def test_sweep_rejects_nine(capsys):
    assert run_cli(capsys, "sweep", "--d", "9", "--family", "a")[0] == 2


def test_cross_validate(capsys):
    code, out, _ = run_cli(capsys, "cross-validate", "--d", "5", "--json")
    assert code == 0
    assert json.loads(out)["counts"]["mismatches"] == 0


def test_out_file(tmp_path, capsys):
    path = tmp_path / "rep.json"
    code, out, _ = run_cli(capsys, "verify-mub", "--d", "5", "--json", "--out", str(path))
    assert code == 0
    assert json.loads(path.read_text()) == json.loads(out)


def test_tolerance_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("URM_TOLERANCE", "1e-18")
    assert run_cli(capsys, "verify-mub", "--d", "5")[0] == 1
    monkeypatch.setenv("URM_TOLERANCE", "1e-9")
    assert run_cli(capsys, "verify-mub", "--d", "5")[0] == 0


def test_bad_invocations_exit_two(capsys):
    assert run_cli(capsys)[0] == 2
    assert run_cli(capsys, "bogus", "--d", "3")[0] == 2
    assert run_cli(capsys, "verify-mub")[0] == 2
    assert run_cli(capsys, "verify-mub", "--d", "3", "--tolerance", "-1")[0] == 2


def test_module_entry_point_is_byte_identical():
    cmd = [sys.executable, "-m", "urm", "run", "--d", "5", "--seed", "123", "--trials", "20"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout
    assert a.returncode == 0
