from __future__ import annotations

import json

import numpy as np
import pytest

from antidist import catalog, io
from antidist.locc import verify_protocol
from antidist.repro import rank_one_alice_protocol


def test_ensemble_round_trip():
    for e in (catalog.eq_x1(), catalog.eq_necessary(), catalog.eq_pr()):
        back = io.ensemble_from_dict(json.loads(io.dumps(io.ensemble_to_dict(e))))
        assert back.dims == e.dims and back.labels == e.labels
        for a, b in zip(e.vectors(), back.vectors()):
            assert abs(abs(np.vdot(a, b)) - 1) < 1e-12


def test_named_parts_and_plain_reals():
    e = io.ensemble_from_dict({"states": [{"parts": ["0", [1, 0]]}, {"parts": ["+", [0, [1, 0]]]}]})
    assert e.dims == (2, 2) and e.is_product


def test_povm_round_trip():
    povm = catalog.alice_x1_povm()
    back, x = io.povm_from_dict(json.loads(io.dumps(io.povm_to_dict(povm))))
    assert x == 1 and back.labels() == povm.labels()
    for s in povm.labels():
        assert np.allclose(back.outcomes[s], povm.outcomes[s], atol=1e-14)


def test_protocol_round_trip():
    tree = rank_one_alice_protocol()
    back = io.protocol_from_dict(json.loads(io.dumps(io.protocol_to_dict(tree))))
    rep = verify_protocol(back, catalog.eq_x1(), 2)
    assert rep.success and not rep.strong_success


@pytest.mark.parametrize(
    "obj, where",
    [
        ([], "$"),
        ({"states": [{"parts": ["0"]}]}, "$.states"),
        ({"states": [{"parts": ["0"]}, {"parts": ["zz"]}]}, "$.states[1].parts[0]"),
        ({"states": [{"parts": ["0"]}, {"kind": "mixed"}]}, "$.states[1].kind"),
        ({"states": [{"amplitudes": [1, "a"]}, {"amplitudes": [0, 1]}]}, "$.states[0].amplitudes[1]"),
        ({"states": [{"parts": ["0"]}, {"parts": ["1"]}], "priors": ["a", 1]}, "$.priors"),
        ({"dims": [2, 2], "states": [{"parts": ["0"]}, {"parts": ["1"]}]}, "$.states[0].parts"),
    ],
)
def test_ensemble_schema_errors(obj, where):
    with pytest.raises(io.SchemaError) as info:
        io.ensemble_from_dict(obj)
    assert info.value.path == where


def test_povm_schema_errors():
    with pytest.raises(io.SchemaError, match="outcomes"):
        io.povm_from_dict({"x": 1})
    with pytest.raises(io.SchemaError) as info:
        io.povm_from_dict({"outcomes": {"1": [[1, 0], [0]]}})
    assert info.value.path == "$.outcomes['1'][1]"
    with pytest.raises(io.SchemaError, match="x = 2"):
        io.povm_from_dict({"x": 2, "outcomes": {"1": [[1]]}})


def test_protocol_schema_errors():
    with pytest.raises(io.SchemaError, match="dims"):
        io.protocol_from_dict({"root": {}})
    with pytest.raises(io.SchemaError) as info:
        io.protocol_from_dict({"dims": [2], "root": {"party": 0, "povm": [[[1]]], "children": {"5": {}}}})
    assert info.value.path == "$.root.children"
    with pytest.raises(io.SchemaError, match="1-based"):
        io.protocol_from_dict({"dims": [2], "root": {"exclude": [0]}})


def test_json_syntax_error_has_line():
    with pytest.raises(io.SchemaError) as info:
        io.load_json_text('{\n  "states": [\n  ,\n]}', "f.json")
    assert "line 3" in info.value.path


def test_missing_file(tmp_path):
    with pytest.raises(io.SchemaError, match="cannot read"):
        io.load_json_file(str(tmp_path / "nope.json"))
