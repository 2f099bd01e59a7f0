"""CLI behavior through main()."""

import json

from llflow.cli import main


def run(capsys, tmp_path, *args):
    code = main(["--workspace", str(tmp_path / "ws.json"), *args])
    out = capsys.readouterr()
    return code, out.out, out.err


def seed_drug(capsys, tmp_path):
    assert run(capsys, tmp_path, "add", "DeliverDrug",
               "~Patient, ~Dosage, ~NurseTime, Treated+Failed")[0] == 0
    assert run(capsys, tmp_path, "add", "Reassess",
               "~Failed, ~ClinTime, Reassessed")[0] == 0


def test_add_list(capsys, tmp_path):
    seed_drug(capsys, tmp_path)
    code, out, _ = run(capsys, tmp_path, "list")
    assert code == 0
    assert "DeliverDrug" in out and "Reassess" in out


def test_compose_and_simulate(capsys, tmp_path):
    seed_drug(capsys, tmp_path)
    code, out, _ = run(capsys, tmp_path, "compose", "join", "DeliverDrug", "Reassess",
                       "--priority", "r", "--input", "~Failed")
    assert code == 0
    assert "ClinTime*Treated+Reassessed" in out
    code, out, _ = run(capsys, tmp_path, "simulate", "c1")
    assert code == 0
    assert out.count("completed") == 2
    assert "'Reassessed': 1" in out


def test_render_dot(capsys, tmp_path):
    seed_drug(capsys, tmp_path)
    run(capsys, tmp_path, "compose", "join", "DeliverDrug", "Reassess",
        "--priority", "r", "--input", "~Failed")
    code, out, _ = run(capsys, tmp_path, "render", "c1", "--dot")
    assert code == 0
    assert out.startswith("digraph") and "style=dashed" in out


def test_render_json(capsys, tmp_path):
    seed_drug(capsys, tmp_path)
    run(capsys, tmp_path, "compose", "tensor", "DeliverDrug", "Reassess")
    code, out, _ = run(capsys, tmp_path, "render", "c1")
    assert json.loads(out)["boundary"]["output"]


def test_proof_export(capsys, tmp_path):
    seed_drug(capsys, tmp_path)
    run(capsys, tmp_path, "compose", "join", "DeliverDrug", "Reassess",
        "--priority", "r", "--input", "~Failed")
    code, out, _ = run(capsys, tmp_path, "proof", "c1")
    assert code == 0
    data = json.loads(out)
    assert data["rule"] == "cut"
    assert {p.get("process") for p in data["premises"] if "process" in p} == {"DeliverDrug"}


def test_prove_provable_and_not(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "prove", "A*B", "B*A")
    assert code == 0
    assert json.loads(out)["rule"] == "par"
    code, out, _ = run(capsys, tmp_path, "prove", "B", "C")
    assert code == 1
    assert out.strip() == "unprovable"


def test_selftest_green(capsys, tmp_path):
    code, out, _ = run(capsys, tmp_path, "selftest")
    assert code == 0
    assert "[FAIL]" not in out
    assert out.count("[PASS]") == 11 + 18 + 4 + 1
    assert "all green" in out


def test_error_reporting(capsys, tmp_path):
    code, _, err = run(capsys, tmp_path, "compose", "tensor", "ghost", "ghost2")
    assert code == 2
    assert "unknown_process" in err


def test_failed_mutation_not_saved(capsys, tmp_path):
    seed_drug(capsys, tmp_path)
    code, _, err = run(capsys, tmp_path, "compose", "join", "DeliverDrug", "Reassess",
                       "--priority", "l", "--input", "~Failed")
    assert code == 2 and "priority_unmatchable" in err
    code, out, _ = run(capsys, tmp_path, "list")
    assert "composition" not in out
