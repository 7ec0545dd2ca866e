import json

import pytest

from gsmalleable import jsonio
from gsmalleable.cli import EXIT_INFEASIBLE, EXIT_INVALID, EXIT_INVARIANT, EXIT_OK, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def instance(tmp_path, capsys):
    path = tmp_path / "inst.json"
    code, out, _ = run(capsys, "gen", "--seed", 3, "--profile", "mixed")
    assert code == EXIT_OK
    path.write_text(out)
    return path


def test_gen_is_deterministic(capsys):
    a = run(capsys, "gen", "--seed", 5, "--profile", "wmr-partition", "-m", 3, "-n", 2)[1]
    b = run(capsys, "gen", "--seed", 5, "--profile", "wmr-partition", "-m", 3, "-n", 2)[1]
    assert a == b and len(json.loads(a)["machines"]) == 3


def test_check(capsys, instance):
    code, out, _ = run(capsys, "check", instance)
    assert code == EXIT_OK
    assert set(json.loads(out)["mnat"].values()) == {"ok"}


def test_check_reports_exchange_violation(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"machines": ["a", "b", "c"], "jobs": [
        {"id": "j", "speed": {"type": "explicit_table", "values": [0, 3, 3, 4, 2, 3, 4, 4]}}]}))
    code, out, _ = run(capsys, "check", p)
    assert code == EXIT_INVALID
    assert json.loads(out)["mnat"]["j"] == {"S": ["a"], "T": ["b", "c"], "element": "a"}


def test_lp_search_and_infeasible(capsys, instance):
    code, out, _ = run(capsys, "lp", instance, "--search")
    assert code == EXIT_OK and json.loads(out)["C"] == "4/5"
    code, out, _ = run(capsys, "lp", instance, "--makespan", "1/1000")
    assert code == EXIT_INFEASIBLE and json.loads(out)["status"] == "infeasible"


def test_lp_dump(capsys, instance):
    code, out, _ = run(capsys, "lp-dump", instance, "--makespan", 1)
    assert code == EXIT_OK
    assert out.startswith("\\ configuration LP\nMaximize\n") and out.rstrip().endswith("End")


def test_solve_report_recheck(capsys, instance, tmp_path):
    rep = tmp_path / "report.json"
    code, out, _ = run(capsys, "solve", instance, "--search", "--report", rep, "--trace")
    assert code == EXIT_OK
    res = json.loads(out)
    report = json.loads(rep.read_text())
    assert report["certified"]["load"] == res["load"]
    assert report["input_digest"] == jsonio.digest(json.loads(instance.read_text()))
    assert "trace" in report
    code, out, _ = run(capsys, "recheck", instance, rep)
    assert code == EXIT_OK and json.loads(out)["consistent"]

    report["certified"]["load"] = "1/2"
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(report))
    code, out, _ = run(capsys, "recheck", instance, bad)
    assert code == EXIT_INVARIANT and not json.loads(out)["consistent"]


def test_solve_infeasible_makespan(capsys, instance):
    code, _, err = run(capsys, "solve", instance, "--makespan", "1/1000")
    assert code == EXIT_INFEASIBLE and "infeasible" in err


def test_schedule(capsys, instance, tmp_path):
    a = tmp_path / "a.json"
    a.write_text(json.dumps({"j0": ["m0"], "j1": ["m0"]}))
    code, out, _ = run(capsys, "schedule", instance, a)
    assert code == EXIT_OK
    assert json.loads(out)["makespan"] == "92/65"


def test_mmfa(capsys, tmp_path):
    p = tmp_path / "mm.json"
    p.write_text(run(capsys, "gen", "--seed", 1, "--mmfa")[1])
    code, out, _ = run(capsys, "mmfa", p)
    res = json.loads(out)
    assert code == EXIT_OK and res["status"] == "ok" and res["max_multiplicity"] <= 78
    code, _, err = run(capsys, "mmfa", p, "--santa")
    assert code == EXIT_INVALID and "linear" in err


def test_verify(capsys, instance):
    code, out, _ = run(capsys, "verify", instance)
    res = json.loads(out)
    assert code == EXIT_OK and res["within_bound"] and res["optimum"] == "4/5"


def test_invalid_inputs(capsys, tmp_path):
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"machines": ["a"], "jobs": [{"id": "x", "speed": {"type": "linear",
                                                                             "weights": {"a": 0.5}}}]}))
    assert run(capsys, "solve", p, "--makespan", 1)[0] == EXIT_INVALID
    assert run(capsys, "solve", tmp_path / "missing.json", "--makespan", 1)[0] == EXIT_INVALID
    with pytest.raises(SystemExit):
        main(["solve", str(p), "--makespan", "0.5"])
