from __future__ import annotations

import csv
import json

import pytest

from antidist import catalog, io
from antidist.cli import main
from antidist.repro import necessary_basis_protocol


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_antidist_builtin(capsys):
    code, out, _ = run(capsys, "antidist", "--builtin", "eq-pbr:cos2theta=0.7071067811865476", "--strong")
    assert code == 0 and "value: 1.000000" in out and "strong: true" in out


def test_antidist_json_and_file(capsys, tmp_path):
    f = tmp_path / "e.json"
    f.write_text(io.dumps(io.ensemble_to_dict(catalog.alice_x1_set())))
    code, out, _ = run(capsys, "antidist", str(f), "--json", "--show-povm")
    data = json.loads(out)
    assert code == 0 and data["value"] == pytest.approx(1, abs=1e-7) and "povm" in data


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "antidist")[0] == 1
    assert run(capsys, "antidist", "--builtin", "nope")[0] == 1
    assert run(capsys, "antidist", "--builtin", "eq-x1", "--x", "4")[0] == 1
    assert run(capsys, "antidist", "--bogus")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": [}')
    code, _, err = run(capsys, "antidist", str(bad))
    assert code == 1 and "line 1" in err


def test_non_convergence_exit(capsys, monkeypatch):
    monkeypatch.setenv("ANTIDIST_MAX_ITER", "2")
    assert run(capsys, "antidist", "--builtin", "eq-x1")[0] == 2


def test_locc_search_output(capsys):
    code, out, _ = run(capsys, "locc", "--builtin", "eq-x1", "--x", "2", "--starter", "A")
    assert code == 0 and "success" in out and "blocking" not in out
    code, out, _ = run(capsys, "locc", "--builtin", "eq-x1", "--x", "2", "--starter", "B")
    assert code == 0 and "failure" in out and "three-state check false" in out
    code, out, _ = run(capsys, "locc", "--builtin", "eq-xanti:eps=0.45", "--x", "2", "--strong", "--starter", "B", "--json")
    data = json.loads(out)
    assert not data["search"]["success"] and data["search"]["unreachable"] == ["1,4"]


def test_locc_rejects_entangled(capsys):
    code, _, err = run(capsys, "locc", "--builtin", "eq-necessary")
    assert code == 1 and "product" in err


def test_locc_bipartitions(capsys):
    code, out, _ = run(capsys, "locc", "--builtin", "eq-pr", "--bipartitions")
    assert code == 0 and "genuine: true" in out


def test_three_state_check(capsys):
    code, out, _ = run(capsys, "three-state-check", "1/4", "1/4", "1/4", "--json")
    data = json.loads(out)
    assert code == 0 and data["antidistinguishable"] is True and data["boundary"] is True
    assert run(capsys, "three-state-check", "0.5", "0.5")[0] == 1
    code, out, _ = run(capsys, "three-state-check", "0.9", "0.9", "0.9")
    assert "antidistinguishable: false" in out


def test_verify_povm(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text(io.dumps(io.povm_to_dict(catalog.alice_x1_povm())))
    code, out, _ = run(capsys, "verify-povm", str(f), "--builtin", "appendix-a")
    assert code == 0 and "feasible at tol 0.0005: true" in out
    assert run(capsys, "verify-povm", str(f), "--builtin", "appendix-a", "--tol", "1e-9")[0] == 3


def test_verify_protocol(capsys, tmp_path):
    e, tree = necessary_basis_protocol()
    pf, ef = tmp_path / "t.json", tmp_path / "e.json"
    pf.write_text(io.dumps(io.protocol_to_dict(tree)))
    ef.write_text(io.dumps(io.ensemble_to_dict(e)))
    code, out, _ = run(capsys, "verify-protocol", str(pf), str(ef), "--strong")
    assert code == 0 and "strong: true" in out
    obj = io.protocol_to_dict(tree)
    obj["root"]["children"]["0"] = {"exclude": [1]}
    pf.write_text(io.dumps(obj))
    code, out, _ = run(capsys, "verify-protocol", str(pf), str(ef))
    assert code == 3 and "not excluded" in out


def test_repro_single_and_unknown(capsys):
    code, out, _ = run(capsys, "repro", "lemma1")
    assert code == 0 and out.startswith("PASS")
    assert run(capsys, "repro", "nonexistent")[0] == 1


def test_repro_json_deterministic(capsys):
    c1, a, _ = run(capsys, "repro", "prop8-n2", "--json")
    c2, b, _ = run(capsys, "repro", "prop8-n2", "--json")
    assert c1 == c2 == 0 and a == b and json.loads(a)["passed"] is True


def test_sweep_csv(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--builtin", "bob-xanti", "--start", "0.2", "--stop", "0.5", "--num", "4", "--x", "2", "--strong", "--out", str(out))
    rows = list(csv.DictReader(out.open()))
    assert code == 0 and len(rows) == 4
    assert rows[0]["strong"] == "true" and rows[-1]["strong"] == "false"
    assert float(rows[-1]["value"]) < 1 - 1e-4
    assert run(capsys, "sweep", "--start", "0", "--stop", "1", "--num", "0")[0] == 1
