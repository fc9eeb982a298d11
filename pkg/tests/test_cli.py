import json

import pytest

from godelkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_golden(capsys):
    assert run(capsys, "eval", "151", "4") == (0, "phi_151(4) = 5  [2 steps]\n", "")
    code, out, _ = run(capsys, "eval", "151", "4", "--format", "json")
    assert json.loads(out) == {
        "index": "151", "input": "4", "outcome": "halted", "step_limit": 100000, "steps": 2, "value": "5",
    }


def test_eval_assembly_file(capsys, tmp_path):
    prog = tmp_path / "succ.gk"
    prog.write_text("INC 0\nINC 0\nHALT\n")
    code, out, _ = run(capsys, "eval", str(prog), "1", "--show-program")
    assert code == 0 and out.endswith("= 3  [3 steps]\n")


def test_eval_exhausted(capsys):
    code, out, _ = run(capsys, "eval", "102", "1", "--steps", "50")
    assert code == 0 and out == "phi_102(1) exhausted 50 steps\n"


def test_enumerate_and_table_golden(capsys):
    assert run(capsys, "enumerate", "7", "--indices", "5", "--steps", "1000")[1] == "W_7 prefix (6 found): [0, 1, 2, 3, 4, 5]\n"
    out = run(capsys, "complexity-table", "--max", "3", "--indices", "50", "--steps", "1000")[1]
    assert out == "m  k_upper(m)\n0  0\n1  18\n2  >50\n3  >50\n"


def test_usage_errors(capsys):
    assert run(capsys, "kleene")[0] == 2
    assert run(capsys, "kleene", "--theory", "no-such-theory")[0] == 2
    assert run(capsys, "eval", "7", "--steps", "0")[0] == 2
    assert run(capsys, "pigeonhole", "9")[0] == 2
    assert run(capsys, "tower", "--theory", "empty", "--depth", "9")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_kleene_text(capsys):
    code, out, _ = run(capsys, "kleene", "--theory", "empty", "--steps", "1000", "--indices", "5", "--enum", "5")
    assert code == 0
    assert "phi_t(t) within 1000 steps: exhausted" in out and "W_t prefix: []" in out


def test_manifest_theory(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"kind": "axiomatic", "axioms": ["(= 0 0)"]}))
    code, out, _ = run(capsys, "boolos", "--theory", str(path))
    assert code == 0 and "VERIFIED" in out
    path.write_text("{not json")
    assert run(capsys, "boolos", "--theory", str(path))[0] == 2


def test_certificate_replay(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code, _, _ = run(capsys, "chaitin", "--theory", "Q", "--steps", "5000", "--indices", "10", "--enum", "10",
                     "--output", str(cert))
    assert code == 0
    assert run(capsys, "chaitin", "--replay", str(cert)) == (0, "REPLAY OK (chaitin)\n", "")
    data = json.loads(cert.read_text())
    data["result"]["c"] = "1"
    cert.write_text(json.dumps(data))
    code, out, _ = run(capsys, "chaitin", "--replay", str(cert))
    assert code == 1 and out.startswith("REPLAY FAILED")
    assert run(capsys, "chaitin", "--replay", str(tmp_path / "missing.json"))[0] == 2


def test_pigeonhole(capsys):
    code, out, _ = run(capsys, "pigeonhole", "1", "--fuzz", "20", "--seed", "3")
    assert code == 0
    assert out.splitlines()[-2:] == ["VERIFIED", "mutations rejected: 20/20"]
    code, out, _ = run(capsys, "pigeonhole", "0", "--format", "json")
    assert json.loads(out)["verified"] is True
