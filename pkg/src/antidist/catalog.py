"""Named ensembles and the published optimal measurements.

Builtin names accepted by :func:`builtin` (also used by the CLI's
``--builtin``): ``eq-x1``, ``eq-xanti:eps=E``, ``bob-xanti:eps=E``,
``eq-pbr:theta=T`` (or ``cos2theta=C``), ``eq-n2``, ``eq-pr``,
``eq-necessary``, ``thm5:d=D``, ``appendix-a``.
"""

from __future__ import annotations

import math

import numpy as np

from .exclusion import Povm, parse_subset_label, theorem5_family
from .linalg import projector
from .states import Ensemble, ProductState, PureState, basis, make_named_state as ns, marginal_set


def eq_x1() -> Ensemble:
    """|0>|0>, |+>|1>, |v+>|+>, |v->|->."""
    pairs = [("0", "0"), ("+", "1"), ("v+", "+"), ("v-", "-")]
    return Ensemble(tuple(ProductState((ns(a), ns(b))) for a, b in pairs), labels=("δ1", "δ2", "δ3", "δ4"))


def alice_x1_set() -> Ensemble:
    """Alice's local states of :func:`eq_x1`: |0>, |+>, |v+>, |v->."""
    return marginal_set(eq_x1(), 0)


def eq_xanti(eps: float) -> Ensemble:
    """Qubit-ququart product states whose Bob parts have all overlaps equal to ``eps``."""
    alice = ["0", "+", "v+", "v-"]
    states = tuple(ProductState((ns(a), ns(f"phi{k + 1}_bob", eps))) for k, a in enumerate(alice))
    return Ensemble(states, labels=("φ1", "φ2", "φ3", "φ4"))


def bob_xanti(eps: float) -> Ensemble:
    return marginal_set(eq_xanti(eps), 1)


def eq_pbr(theta: float | None = None, cos2theta: float | None = None) -> Ensemble:
    """|±θ>|±θ> in the order ++, +-, -+, --."""
    if (theta is None) == (cos2theta is None):
        raise ValueError("give exactly one of theta and cos2theta")
    if theta is None:
        theta = math.acos(cos2theta) / 2
    p, m = ns("plus_theta", theta), ns("minus_theta", theta)
    states = (ProductState((p, p)), ProductState((p, m)), ProductState((m, p)), ProductState((m, m)))
    return Ensemble(states, labels=("++", "+-", "-+", "--"))


def eq_n2() -> Ensemble:
    """|00>, |11>, |+>|η1>, |->|η2>."""
    pairs = [("0", "0"), ("1", "1"), ("+", "eta1"), ("-", "eta2")]
    return Ensemble(tuple(ProductState((ns(a), ns(b))) for a, b in pairs), labels=("ζ1", "ζ2", "ζ3", "ζ4"))


def eq_pr() -> Ensemble:
    """|000>, |0++>, |++0> on three qubits."""
    triples = [("0", "0", "0"), ("0", "+", "+"), ("+", "+", "0")]
    return Ensemble(tuple(ProductState(tuple(ns(c) for c in t)) for t in triples))


def eq_necessary() -> Ensemble:
    """Two product states and one entangled state on two qubits."""
    r = 1 / math.sqrt(2)
    psi1 = [r, r, 0, 0]  # |0>(|0> + |1>)/sqrt2
    psi2 = [r, 0, r, 0]  # (|00> + |10>)/sqrt2
    psi3 = [0, r, r, 0]  # (|01> + |10>)/sqrt2
    return Ensemble(tuple(PureState(v) for v in (psi1, psi2, psi3)), dims=(2, 2), labels=("ψ1", "ψ2", "ψ3"))


def orthogonal_triple() -> Ensemble:
    """|000>, |011>, |101>."""
    triples = [("0", "0", "0"), ("0", "1", "1"), ("1", "0", "1")]
    return Ensemble(tuple(ProductState(tuple(ns(c) for c in t)) for t in triples))


def thm5(d: int = 2) -> Ensemble:
    return theorem5_family(d)


def _parse_params(text: str) -> dict[str, float]:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"bad parameter {item!r}; expected key=value")
        out[key.strip()] = float(eval_number(val.strip()))
    return out


def eval_number(text: str) -> float:
    """Parse a number, also accepting simple fractions like ``1/3``."""
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


BUILTINS = ("eq-x1", "eq-xanti", "bob-xanti", "eq-pbr", "eq-n2", "eq-pr", "eq-necessary", "thm5", "appendix-a")


def builtin(spec: str) -> Ensemble:
    """Build a named ensemble from ``name[:key=value,...]``."""
    name, _, params = spec.partition(":")
    kw = _parse_params(params)
    name = name.strip()
    if name == "eq-x1":
        return eq_x1()
    if name == "appendix-a":
        return alice_x1_set()
    if name in ("eq-xanti", "bob-xanti"):
        if "eps" not in kw:
            raise ValueError(f"{name} needs eps=...")
        return (eq_xanti if name == "eq-xanti" else bob_xanti)(kw["eps"])
    if name == "eq-pbr":
        if "theta" in kw:
            return eq_pbr(theta=kw["theta"])
        if "cos2theta" in kw:
            return eq_pbr(cos2theta=kw["cos2theta"])
        raise ValueError("eq-pbr needs theta=... or cos2theta=...")
    if name == "eq-n2":
        return eq_n2()
    if name == "eq-pr":
        return eq_pr()
    if name == "eq-necessary":
        return eq_necessary()
    if name == "thm5":
        return thm5(int(kw.get("d", 2)))
    raise ValueError(f"unknown builtin ensemble {name!r}; known: {', '.join(BUILTINS)}")


# Published optimal measurements, to four decimals.

_S3 = math.sqrt(3)


def alice_x1_povm() -> Povm:
    k1 = basis(2, 1).vector
    minus = ns("-").vector
    v_plus_perp = np.array([_S3 / 2, -0.5])
    v_minus_perp = np.array([_S3 / 2, 0.5])
    elems = [
        0.5506 * projector(k1),
        0.3483 * projector(minus),
        0.3495 * projector(v_plus_perp),
        0.7517 * projector(v_minus_perp),
    ]
    return Povm({(k,): m for k, m in enumerate(elems)})


_N_HALF = {
    "12": [[0.0053, 0.0031, 0.0467, 0.0362], [0.0031, 0.0018, 0.0270, 0.0209],
           [0.0467, 0.0270, 0.4123, 0.3193], [0.0362, 0.0209, 0.3193, 0.2474]],
    "13": [[0.0053, 0.0451, -0.0127, 0.0362], [0.0451, 0.3836, -0.108, 0.308],
           [-0.0127, -0.108, 0.0304, -0.0867], [0.0362, 0.308, -0.0867, 0.2474]],
    "14": [[0.0053, 0.0451, 0.0319, -0.0213], [0.0451, 0.3836, 0.2712, -0.1816],
           [0.0319, 0.2712, 0.1918, -0.1284], [-0.0213, -0.1816, -0.1284, 0.086]],
    "23": [[0.328, -0.1413, -0.0999, 0.2849], [-0.1413, 0.0608, 0.043, -0.1227],
           [-0.0999, 0.043, 0.0304, -0.0867], [0.2849, -0.1227, -0.0867, 0.2474]],
    "24": [[0.328, -0.1413, 0.2508, -0.1679], [-0.1413, 0.0608, -0.108, 0.0723],
           [0.2508, -0.108, 0.1918, -0.1284], [-0.1679, 0.0723, -0.1284, 0.086]],
    "34": [[0.328, 0.1894, -0.2168, -0.1679], [0.1894, 0.1093, -0.1252, -0.097],
           [-0.2168, -0.1252, 0.1433, 0.111], [-0.1679, -0.097, 0.111, 0.086]],
}

_F_THIRD = {
    "12": [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0.4, 0.3265], [0, 0, 0.3265, 0.2667]],
    "13": [[0, 0, 0, 0], [0, 0.375, -0.0968, 0.3162], [0, -0.0968, 0.0250, -0.0816],
           [0, 0.3162, -0.0816, 0.2667]],
    "14": [[0, 0, 0, 0], [0, 0.3750, 0.2904, -0.1581], [0, 0.2904, 0.2250, -0.1225],
           [0, -0.1581, -0.1225, 0.0667]],
    "23": [[0.3333, -0.1178, -0.0913, 0.2981], [-0.1178, 0.0417, 0.0323, -0.1054],
           [-0.0913, 0.0323, 0.025, -0.0816], [0.2981, -0.1054, -0.0816, 0.2667]],
    "24": [[0.3333, -0.1178, 0.2738, -0.1491], [-0.1178, 0.0417, -0.0968, 0.0527],
           [0.2738, -0.0968, 0.2250, -0.1225], [-0.1491, 0.0527, -0.1225, 0.0667]],
    "34": [[0.3333, 0.2357, -0.1826, -0.1491], [0.2357, 0.1667, -0.1291, -0.1054],
           [-0.1826, -0.1291, 0.1000, 0.0816], [-0.1491, -0.1054, 0.0816, 0.0667]],
}

# Keyed as printed.  The printed index pair is the complement of the pair of
# states the element annihilates (P34 has zero rows/columns on |00> and |11>).
_P_N2_PRINTED = {
    "12": [[0.0025, -0.0059, 0.0009, 0], [-0.0059, 0.0158, -0.0003, -0.0051],
           [0.0009, -0.0003, 0.0022, -0.0051], [0, -0.0051, -0.0051, 0.0140]],
    "13": [[0.4722, 0.0657, 0.4898, 0], [0.0657, 0.0250, 0.0724, 0],
           [0.4898, 0.0724, 0.5092, 0], [0, 0, 0, 0]],
    "14": [[0.5253, -0.0598, -0.4907, 0], [-0.0598, 0.0197, 0.0485, 0],
           [-0.4907, 0.0485, 0.4628, 0], [0, 0, 0, 0]],
    "23": [[0, 0, 0, 0], [0, 0.3232, -0.0329, 0.4460], [0, -0.0329, 0.0057, -0.0540],
           [0, 0.4460, -0.0540, 0.6476]],
    "24": [[0, 0, 0, 0], [0, 0.5873, -0.0845, -0.4408], [0, -0.0845, 0.0147, 0.0592],
           [0, -0.4408, 0.0592, 0.3384]],
    "34": [[0, 0, 0, 0], [0, 0.0290, -0.0032, 0], [0, -0.0032, 0.0055, 0], [0, 0, 0, 0]],
}


def _povm_from_table(table: dict, complement_of: int | None = None) -> Povm:
    out = {}
    for label, rows in table.items():
        s = parse_subset_label(label)
        if complement_of is not None:
            s = tuple(k for k in range(complement_of) if k not in s)
        out[s] = np.array(rows, dtype=complex)
    return Povm(out)


def bob_povm_half() -> Povm:
    """Published optimum at eps = 1/2 (N matrices)."""
    return _povm_from_table(_N_HALF)


def bob_povm_third() -> Povm:
    """Published optimum at eps = 1/3 (F matrices)."""
    return _povm_from_table(_F_THIRD)


def n2_povm() -> Povm:
    """Published optimum for the |00>, |11>, |+>|η1>, |->|η2> task, relabelled by excluded pair."""
    return _povm_from_table(_P_N2_PRINTED, complement_of=4)


PRINTED_POVMS = {
    "appendix-a": (alice_x1_set, alice_x1_povm, 1),
    "appendix-b-half": (lambda: bob_xanti(0.5), bob_povm_half, 2),
    "appendix-b-third": (lambda: bob_xanti(1 / 3), bob_povm_third, 2),
    "appendix-c": (eq_n2, n2_povm, 2),
}
