import json
import subprocess
import sys

import pytest

from leibniz_local.cli import main


@pytest.fixture
def alg(tmp_path):
    def make(*args):
        out = tmp_path / ("_".join(a.strip("-").replace(",", "") for a in args) + ".json")
        assert main(["catalog", *args, "--out", str(out)]) == 0
        return str(out)
    return make


def _report(path):
    data = json.loads(open(path).read())
    data.pop("timings")
    return data


def test_catalog_to_stdout(capsys):
    assert main(["catalog", "r1", "--n", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["dim"] == 4 and data["basis"] == ["f1", "f2", "f3", "x"]


def test_catalog_negative_alphas(capsys):
    assert main(["catalog", "lt", "--n", "2", "--alphas", "-1,0"]) == 0
    assert json.loads(capsys.readouterr().out)["family"]["alphas"] == [-1, 0]


def test_catalog_bad_params(capsys):
    assert main(["catalog", "lt", "--n", "2", "--alphas", "1,0"]) == 1
    assert "error" in capsys.readouterr().err


def test_der_report(alg, tmp_path, capsys):
    path = alg("rmodel", "--m", "3,2")
    out = tmp_path / "der.json"
    assert main(["der", path, "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "dim Der = 3, dim Inner = 3, Inner = Der: True" in text
    rep = _report(out)
    assert rep["command"] == "der" and rep["verdicts"]["der_is_lie_algebra"]
    assert rep["tool_version"] and rep["seed"] is None


def test_der_rejects_non_leibniz(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    doc = {"dim": 2, "basis": ["a", "b"], "brackets": [{"i": 0, "j": 0, "terms": [[1, "1"]]},
                                                       {"i": 1, "j": 0, "terms": [[0, "1"]]}]}
    bad.write_text(json.dumps(doc))
    assert main(["der", str(bad)]) == 1
    assert "Leibniz identity" in capsys.readouterr().err


def test_der_strict_scalars(tmp_path, alg):
    path = alg("r1", "--n", "3")
    doc = json.loads(open(path).read())
    doc["brackets"][0]["terms"][0][1] = "2/2"
    p = tmp_path / "nc.json"
    p.write_text(json.dumps(doc))
    assert main(["der", str(p)]) == 1
    assert main(["der", str(p), "--normalize"]) == 0


def test_locder_exit_codes(alg, tmp_path):
    rm = alg("rmodel", "--m", "3,2")
    assert main(["locder", rm, "--seed", "0"]) == 0
    out = tmp_path / "fixed.json"
    assert main(["locder", rm, "--seed", "0", "--strategy", "paper", "--trials", "200", "--json", str(out)]) == 2
    rep = _report(out)
    assert rep["verdicts"]["certify"]["status"] == "CandidateGap"
    assert [c["status"] for c in rep["verdicts"]["gap_checks"]] == ["RefutedAt"]


def test_locder_counterexample_report(alg, tmp_path):
    out = tmp_path / "r1.json"
    assert main(["locder", alg("r1", "--n", "4"), "--seed", "0", "--trials", "200", "--json", str(out)]) == 2
    ce = _report(out)["verdicts"]["counterexample"]
    assert not ce["is_derivation"] and ce["closed_form_witnesses_ok"]
    assert ce["sampled"]["status"] == "AllWitnessed"


def test_locder_operator_refuted(alg, tmp_path):
    op = tmp_path / "down.json"
    op.write_text(json.dumps({"dim": 4, "columns": [["0"] * 4, ["0"] * 4, ["1", "0", "0", "0"], ["0"] * 4]}))
    assert main(["locder", alg("r1", "--n", "3"), "--seed", "0", "--operator", str(op)]) == 3


def test_locder_requires_seed(alg):
    with pytest.raises(SystemExit) as exc:
        main(["locder", alg("r1", "--n", "3")])
    assert exc.value.code == 1


def test_twolocal_modes(alg):
    assert main(["twolocal", alg("rmodel", "--m", "3,2"), "--seed", "0"]) == 0
    assert main(["twolocal", alg("r2", "--n", "3"), "--seed", "0"]) == 2
    lt = alg("lt", "--n", "2", "--alphas", "-1,0")
    assert main(["twolocal", lt, "--seed", "0", "--mode", "counterexample", "--pairs", "100"]) == 0
    assert main(["twolocal", alg("r2", "--n", "3"), "--seed", "0", "--mode", "counterexample",
                 "--w", "f3", "--pairs", "100"]) == 0
    assert main(["twolocal", alg("r1", "--n", "3"), "--seed", "0", "--mode", "counterexample", "--w", "f1"]) == 2
    assert main(["twolocal", lt, "--seed", "0", "--mode", "counterexample", "--w", "nope"]) == 1


def test_reports_are_reproducible(alg, tmp_path):
    path = alg("r2", "--n", "3")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["locder", path, "--seed", "7", "--trials", "100", "--json", str(out)]) == 2
    assert json.dumps(_report(a), indent=2) == json.dumps(_report(b), indent=2)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "leibniz_local", "catalog", "r2", "--n", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["dim"] == 3
