import json

import pytest

from pingcert.main import main
from pingcert.services.report_store import list_documents


def test_ball_export(tmp_path, capsys):
    out = tmp_path / "ball.json"
    assert main(["ball", "--pres", "f2", "--radius", "2", "--out", str(out)]) == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["sphere_sizes"] == [1, 4, 12]
    assert document["vertices"][:3] == ["", "a", "A"]
    assert document["letters"] == ["a", "A", "b", "B"]
    assert "17 vertices" in capsys.readouterr().out


def test_json_goes_to_stdout_without_out(capsys):
    assert main(["delta", "--pres", "f2", "--radius", "3"]) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["delta_hat"] == 0
    assert "delta_hat = 0" in captured.err


@pytest.mark.parametrize(
    "argv",
    [
        ["ball"],
        ["ball", "--pres", "no-such-presentation"],
        ["ball", "--pres", "f2", "--radius", "-1"],
        ["mu", "--pres", "f2", "--H", "x"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == 1


def test_malformed_presentation(tmp_path):
    path = tmp_path / "bad.grp"
    path.write_text("gens: a\nrel: aq\n", encoding="utf-8")
    assert main(["ball", "--pres", str(path), "--radius", "1"]) == 1


def test_window_too_small_is_inconclusive():
    assert main(["mu", "--pres", "f2", "--radius", "2", "--H", "aaaa"]) == 2


def test_oracle_refutes_commuting_pair(tmp_path):
    out = tmp_path / "oracle.json"
    assert main(["oracle", "--pres", "z2", "--radius", "3", "--H1", "a", "--K1", "b", "--maxlen", "4", "--out", str(out)]) == 3
    assert json.loads(out.read_text(encoding="utf-8"))["oracle"]["counterexample"] == "abAB"


def test_malnormal_violation_exit_code(tmp_path):
    assert main(["malnormal", "--pres", "f2", "--radius", "3", "--H", "aa", "--out", str(tmp_path / "m.json")]) == 3
    assert main(["malnormal", "--pres", "f2", "--radius", "3", "--H", "a", "--out", str(tmp_path / "m.json")]) == 0


def test_certify_t1_with_pdf_and_ledger(tmp_path):
    out, pdf, ledger = tmp_path / "cert.json", tmp_path / "cert.pdf", tmp_path / "ledger.db"
    argv = ["certify-t1", "--pres", "f2", "--radius", "4", "--H", "a", "--K", "b", "--H1", "a", "--K1", "b"]
    argv += ["--maxlen", "5", "--paths", "10", "--out", str(out), "--pdf", str(pdf), "--ledger", str(ledger)]
    assert main(argv) == 0
    assert json.loads(out.read_text(encoding="utf-8"))["verdict"]["status"] == "CERTIFIED"
    assert pdf.read_bytes().startswith(b"%PDF")
    assert [kind for _, kind in list_documents(ledger)] == ["certificate"]


def test_certify_t2_non_malnormal(tmp_path):
    out = tmp_path / "cert.json"
    argv = ["certify-t2", "--pres", "f2", "--radius", "4", "--H", "aa", "--K", "b", "--H1", "aa"]
    argv += ["--maxlen", "4", "--paths", "5", "--out", str(out)]
    assert main(argv) == 2
    verdict = json.loads(out.read_text(encoding="utf-8"))["verdict"]
    assert verdict == {"status": "INCONCLUSIVE", "reason": "malnormality", "counterexample": None}


def test_instance_invariant_violation_is_a_usage_error(tmp_path):
    argv = ["certify-t1", "--pres", "f2", "--radius", "3", "--H", "a", "--K", "a", "--H1", "a", "--K1", "a"]
    assert main(argv + ["--out", str(tmp_path / "c.json")]) == 1


def test_pingpong_abstract(tmp_path):
    swap = {"1": "3", "2": "4", "3": "1", "4": "2"}
    instance = {
        "points": ["1", "2", "3", "4"],
        "actions": {"e": {p: p for p in "1234"}, "h": swap, "k": swap},
        "H": ["e", "h"],
        "K": ["e", "k"],
        "G0": ["e"],
        "S_H": ["1", "2"],
        "S_K": ["3", "4"],
    }
    path = tmp_path / "instance.json"
    path.write_text(json.dumps(instance), encoding="utf-8")
    out = tmp_path / "result.json"
    assert main(["pingpong-abstract", "--instance", str(path), "--out", str(out)]) == 2
    assert json.loads(out.read_text(encoding="utf-8"))["status"] == "index-guard"

    path.write_text("{not json", encoding="utf-8")
    assert main(["pingpong-abstract", "--instance", str(path)]) == 1


def test_deep_quotient_from_file(tmp_path):
    quotient = tmp_path / "a4.perm"
    quotient.write_text("perm: a = (1 2 3)\nperm: b = (1 2 4)\n", encoding="utf-8")
    out = tmp_path / "q.json"
    assert main(["deep-quotient", "--quotient", str(quotient), "--n", "3", "--out", str(out)]) == 0
    report = json.loads(out.read_text(encoding="utf-8"))["report"]
    assert (report["depth"], report["witness"]) == (3, "aaa")
    assert main(["deep-quotient", "--quotient", str(quotient), "--n", "4", "--out", str(out)]) == 2
