"""JSON formats for ensembles, POVMs, protocols and reports.

Complex numbers are ``[re, im]`` pairs (plain reals are accepted on input),
matrices are row-major lists of rows, and floats are written with 15
significant digits.  State indices and outcome labels in files are 1-based;
party indices are 0-based.

Ensemble::

    {"dims": [2, 2],
     "states": [{"kind": "product", "parts": [[[1, 0], [0, 0]], "+"]},
                {"kind": "flat", "amplitudes": [[0.7071, 0], 0, 0, [0.7071, 0]]}],
     "priors": [0.5, 0.5], "labels": ["a", "b"]}

A product part may be a named state such as ``"0"``, ``"+"`` or ``"v-"``.

POVM::

    {"x": 2, "outcomes": {"1,2": <matrix>, "1,3": <matrix>, ...}}

Protocol::

    {"dims": [2, 4], "order": [0, 1],
     "root": {"party": 0, "povm": [<matrix>, ...],
              "children": {"0": {"exclude": [1]}, "1": {"party": 1, ...}}}}
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .exclusion import ExclusionReport, Povm, parse_subset_label, subset_label
from .states import Ensemble, ProductState, PureState, StateError, make_named_state

SIG_DIGITS = 15


class SchemaError(ValueError):
    """Input file does not follow the expected layout; ``path`` locates the problem."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"at {path}: {message}")


def fmt(v: float) -> float:
    return float(f"{v:.{SIG_DIGITS}g}")


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [fmt(z.real), fmt(z.imag)]


def encode_vector(v) -> list[list[float]]:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list[list[list[float]]]:
    return [[encode_complex(z) for z in row] for row in np.asarray(m)]


def decode_complex(obj: Any, path: str) -> complex:
    if isinstance(obj, bool):
        raise SchemaError(path, "expected a number or [re, im] pair, got a boolean")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in obj):
        return complex(obj[0], obj[1])
    raise SchemaError(path, f"expected a number or [re, im] pair, got {json.dumps(obj)[:40]}")


def decode_vector(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SchemaError(path, "expected a nonempty list of amplitudes")
    return np.array([decode_complex(z, f"{path}[{i}]") for i, z in enumerate(obj)], dtype=complex)


def decode_matrix(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SchemaError(path, "expected a matrix as a list of rows")
    n = len(obj)
    rows = []
    for i, row in enumerate(obj):
        if len(row) != n:
            raise SchemaError(f"{path}[{i}]", f"row has {len(row)} entries, matrix has {n} rows")
        rows.append([decode_complex(z, f"{path}[{i}][{j}]") for j, z in enumerate(row)])
    return np.array(rows, dtype=complex)


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaError(path, f"missing key {key!r}")
    return obj[key]


def _part(obj: Any, path: str) -> PureState:
    if isinstance(obj, str):
        try:
            return make_named_state(obj)
        except StateError as exc:
            raise SchemaError(path, str(exc)) from None
    try:
        return PureState(decode_vector(obj, path))
    except StateError as exc:
        raise SchemaError(path, str(exc)) from None


def load_json_text(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source} line {exc.lineno} column {exc.colno}", exc.msg) from None


def load_json_file(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(path, f"cannot read file ({exc.strerror})") from None
    return load_json_text(text, path)


def ensemble_from_dict(obj: Any, path: str = "$") -> Ensemble:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object with a 'states' list")
    raw = _require(obj, "states", path)
    if not isinstance(raw, list) or len(raw) < 2:
        raise SchemaError(f"{path}.states", "expected a list of at least two states")
    dims = obj.get("dims")
    if dims is not None and (not isinstance(dims, list) or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise SchemaError(f"{path}.dims", "expected a list of positive integers")
    states = []
    for k, s in enumerate(raw):
        sp = f"{path}.states[{k}]"
        if not isinstance(s, dict):
            raise SchemaError(sp, "expected an object with 'kind'")
        kind = s.get("kind", "product" if "parts" in s else "flat")
        if kind == "product":
            parts = _require(s, "parts", sp)
            if not isinstance(parts, list) or not parts:
                raise SchemaError(f"{sp}.parts", "expected a nonempty list of local states")
            ps = ProductState(tuple(_part(p, f"{sp}.parts[{i}]") for i, p in enumerate(parts)))
            if dims is not None and ps.dims != tuple(dims):
                raise SchemaError(f"{sp}.parts", f"local dimensions {list(ps.dims)} differ from dims {dims}")
            states.append(ps)
        elif kind == "flat":
            states.append(_part(_require(s, "amplitudes", sp), f"{sp}.amplitudes"))
        else:
            raise SchemaError(f"{sp}.kind", f"unknown kind {kind!r}; use 'product' or 'flat'")
    priors = obj.get("priors")
    if priors is not None:
        if not isinstance(priors, list) or not all(isinstance(p, (int, float)) for p in priors):
            raise SchemaError(f"{path}.priors", "expected a list of numbers")
    labels = obj.get("labels")
    if labels is not None and (not isinstance(labels, list) or not all(isinstance(t, str) for t in labels)):
        raise SchemaError(f"{path}.labels", "expected a list of strings")
    try:
        return Ensemble(tuple(states), priors, labels, tuple(dims) if dims else None)
    except StateError as exc:
        raise SchemaError(path, str(exc)) from None


def ensemble_to_dict(e: Ensemble) -> dict:
    states = []
    for s in e.states:
        if isinstance(s, ProductState) and e.is_product and e.n_parties > 1:
            states.append({"kind": "product", "parts": [encode_vector(p.vector) for p in s.parts]})
        else:
            states.append({"kind": "flat", "amplitudes": encode_vector(s.vector)})
    return {
        "dims": list(e.dims),
        "states": states,
        "priors": [fmt(p) for p in e.priors],
        "labels": list(e.labels),
    }


def povm_from_dict(obj: Any, path: str = "$") -> tuple[Povm, int | None]:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object with 'outcomes'")
    outs = _require(obj, "outcomes", path)
    if not isinstance(outs, dict) or not outs:
        raise SchemaError(f"{path}.outcomes", "expected a nonempty object mapping labels to matrices")
    parsed = {}
    for label, m in outs.items():
        try:
            s = parse_subset_label(label)
        except ValueError as exc:
            raise SchemaError(f"{path}.outcomes", str(exc)) from None
        if s in parsed:
            raise SchemaError(f"{path}.outcomes[{label!r}]", "duplicate outcome label")
        parsed[s] = decode_matrix(m, f"{path}.outcomes[{label!r}]")
    shapes = {m.shape for m in parsed.values()}
    if len(shapes) != 1:
        raise SchemaError(f"{path}.outcomes", f"matrices have different shapes {sorted(shapes)}")
    sizes = {len(s) for s in parsed}
    x = obj.get("x")
    if x is not None and (not isinstance(x, int) or sizes != {x}):
        raise SchemaError(f"{path}.x", f"x = {x} but outcome labels have sizes {sorted(sizes)}")
    return Povm(parsed), x if x is not None else (sizes.pop() if len(sizes) == 1 else None)


def povm_to_dict(povm: Povm) -> dict:
    return {
        "x": len(povm.labels()[0]),
        "outcomes": {subset_label(s): encode_matrix(povm.outcomes[s]) for s in povm.labels()},
    }


def _node_from_dict(obj: Any, path: str):
    from .locc import Leaf, Node

    if not isinstance(obj, dict):
        raise SchemaError(path, "expected a node object")
    if "party" not in obj:
        exc = obj.get("exclude", [])
        if not isinstance(exc, list) or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in exc):
            raise SchemaError(f"{path}.exclude", "expected a list of 1-based state indices")
        return Leaf(tuple(sorted({k - 1 for k in exc})))
    party = obj["party"]
    if not isinstance(party, int) or isinstance(party, bool) or party < 0:
        raise SchemaError(f"{path}.party", "expected a 0-based party index")
    povm = _require(obj, "povm", path)
    if not isinstance(povm, list) or not povm:
        raise SchemaError(f"{path}.povm", "expected a nonempty list of matrices")
    ops = tuple(decode_matrix(m, f"{path}.povm[{i}]") for i, m in enumerate(povm))
    raw = obj.get("children", {})
    if isinstance(raw, list):
        raw = {str(i): c for i, c in enumerate(raw)}
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}.children", "expected an object keyed by outcome index")
    for key in raw:
        if not key.isdigit() or int(key) >= len(ops):
            raise SchemaError(f"{path}.children", f"child key {key!r} is not an outcome index below {len(ops)}")
    kids = tuple(
        _node_from_dict(raw[str(i)], f"{path}.children[{i}]") if str(i) in raw else Leaf() for i in range(len(ops))
    )
    return Node(party, ops, kids)


def protocol_from_dict(obj: Any, path: str = "$"):
    from .locc import ProtocolTree

    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object with 'dims' and 'root'")
    dims = _require(obj, "dims", path)
    if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise SchemaError(f"{path}.dims", "expected a list of positive integers")
    order = obj.get("order")
    if order is not None and (not isinstance(order, list) or not all(isinstance(p, int) for p in order)):
        raise SchemaError(f"{path}.order", "expected a list of party indices")
    root = _node_from_dict(_require(obj, "root", path), f"{path}.root")
    return ProtocolTree(root, tuple(dims), tuple(order) if order is not None else None)


def _node_to_dict(node) -> dict:
    from .locc import Leaf

    if isinstance(node, Leaf):
        return {"exclude": [k + 1 for k in node.exclude]}
    return {
        "party": node.party,
        "povm": [encode_matrix(m) for m in node.povm],
        "children": {str(i): _node_to_dict(c) for i, c in enumerate(node.children)},
    }


def protocol_to_dict(tree) -> dict:
    return {"dims": list(tree.dims), "order": list(tree.order), "root": _node_to_dict(tree.root)}


def exclusion_report_to_dict(report: ExclusionReport, include_povm: bool = True) -> dict:
    out = {
        "value": fmt(report.value),
        "value_unnormalized": fmt(report.value_unnormalized),
        "x": report.x,
        "status": report.status,
        "strong": report.strong,
        "strong_margin": None if report.strong_margin is None else fmt(report.strong_margin),
        "errors": [fmt(v) for v in report.errors],
        "traces": {subset_label(s): fmt(t) for s, t in report.traces.items()},
        "certificate": report.certificate.to_dict(),
    }
    if include_povm:
        out["povm"] = {subset_label(s): encode_matrix(report.povm.outcomes[s]) for s in report.povm.labels()}
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, ensure_ascii=False)
