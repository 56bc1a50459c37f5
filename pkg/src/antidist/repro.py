"""Registry of reproducible claims, each bound to a runnable check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import catalog
from .analytic import three_state_check, three_state_check_ensemble
from .exclusion import (
    ExclusionTask,
    check_povm,
    exclusion_value,
    locate_threshold,
    strong_exclusion_check,
    subset_label,
    UNNORMALIZED,
)
from .linalg import projector
from .locc import (
    bipartition_scan,
    product_locc_antidist_decision,
    two_round_protocol,
    two_step_search,
    verify_protocol,
)
from .states import Ensemble, PureState, group_by_bipartition, make_named_state

DIGITS = 9


def r(v: float) -> float:
    return round(float(v), DIGITS)


@dataclass
class ClaimOutcome:
    passed: bool
    measured: dict
    expected: str


@dataclass(frozen=True)
class ReproClaim:
    id: str
    cite: str
    description: str
    check: Callable[[], ClaimOutcome]

    def run(self) -> dict:
        out = self.check()
        return {
            "id": self.id,
            "cite": self.cite,
            "description": self.description,
            "passed": out.passed,
            "expected": out.expected,
            "measured": out.measured,
        }


def _value(e: Ensemble, x: int, strong: bool = False, normalization: str = "normalized"):
    return exclusion_value(ExclusionTask(e, x, strong, normalization))


def _basis_povm(vecs) -> list[np.ndarray]:
    return [projector(np.asarray(v, complex)) for v in vecs]


def per_index_example() -> Ensemble:
    """Entangled triple whose per-index Bob triples are all antidistinguishable."""
    s = 1 / math.sqrt(2)
    k0, k1, kp = (make_named_state(n).vector for n in ("0", "1", "+"))
    e0, e1 = np.array([1, 0]), np.array([0, 1])
    psi = s * (np.kron(e0, k0) + np.kron(e1, kp))
    phi = s * (np.kron(e0, k1) + np.kron(e1, k0))
    zeta = s * (np.kron(e0, kp) + np.kron(e1, k1))
    return Ensemble(tuple(PureState(v) for v in (psi, phi, zeta)), dims=(2, 2))


def check_thm1() -> ClaimOutcome:
    e = per_index_example()
    res = two_step_search(e, starter=0, x=1)
    glob = _value(e, 1)
    per_index = [b.responder_value for b in res.branches]
    ok = res.success and res.mode == "basis-first" and glob.perfect and all(v is not None and v >= 1 - 1e-6 for v in per_index)
    return ClaimOutcome(
        ok,
        {"search_success": res.success, "per_index_values": [r(v) for v in per_index], "global_value": r(glob.value)},
        "basis measurement by the starter plus responder exclusion succeeds",
    )


def necessary_basis_protocol():
    e = catalog.eq_necessary()
    z = _basis_povm([[1, 0], [0, 1]])
    return e, two_round_protocol(e, 0, z, [z, None])


def check_lemma1() -> ClaimOutcome:
    e, tree = necessary_basis_protocol()
    rep = verify_protocol(tree, e, x=1, strong=True)
    b1g1 = Ensemble((PureState([1, 0]), PureState([1, 0])))
    pair = _value(b1g1, 1)
    claims = sorted(tuple(k + 1 for k in leaf.claims) for leaf in rep.leaves if not leaf.pruned)
    ok = rep.success and rep.strong_success and pair.value < 1 - 1e-3
    return ClaimOutcome(
        ok,
        {"leaf_claims": [list(c) for c in claims], "strong_success": rep.strong_success, "beta1_gamma1_value": r(pair.value)},
        "leaves exclude psi3, psi2, psi1; {beta1, gamma1} value < 1",
    )


def check_thm2() -> ClaimOutcome:
    cases = {
        "eq-necessary": catalog.eq_necessary(),
        "eq-x1": catalog.eq_x1(),
        "eq-pbr": catalog.eq_pbr(cos2theta=math.cos(math.pi / 4)),
        "eq-pr[0|12]": group_by_bipartition(catalog.eq_pr(), (0,)),
        "eq-pr[01|2]": group_by_bipartition(catalog.eq_pr(), (0, 1)),
    }
    measured = {}
    ok = True
    for name, e in cases.items():
        outs = [two_step_search(e, s, 1).success for s in (0, 1)]
        entry = {"starter_A": outs[0], "starter_B": outs[1]}
        ok &= outs[0] == outs[1]
        if e.is_product:
            dec = product_locc_antidist_decision(e)
            entry["decision"] = dec.antidistinguishable
            ok &= dec.antidistinguishable == outs[0]
        measured[name] = entry
    return ClaimOutcome(ok, measured, "x = 1 search outcome identical for both starters and equal to the marginal rule")


def check_thm3_alice() -> ClaimOutcome:
    e = catalog.eq_x1()
    res = two_step_search(e, 0, 2)
    rep = verify_protocol(res.protocol, e, 2) if res.protocol is not None else None
    rank_one = rank_one_alice_protocol()
    prep = verify_protocol(rank_one, e, 2)
    ok = res.success and rep is not None and rep.success and prep.success and not prep.strong_success
    return ClaimOutcome(
        ok,
        {
            "search_success": res.success,
            "protocol_verified": bool(rep and rep.success),
            "rank_one_protocol_success": prep.success,
            "rank_one_protocol_strong": prep.strong_success,
            "rank_one_protocol_missing": [subset_label(s) for s in prep.missing],
        },
        "Alice-first x = 2 succeeds; the rank-one protocol is not strong",
    )


def rank_one_alice_protocol():
    """Alice excludes one state; Bob measures in the basis of his orthogonal pair."""
    e = catalog.eq_x1()
    alice = catalog.alice_x1_set()
    ach = strong_exclusion_check(ExclusionTask(alice, 1))
    first = [ach.witness.outcomes[(k,)] for k in range(4)]
    zb = _basis_povm([[1, 0], [0, 1]])
    xb = _basis_povm(make_named_state(n).vector for n in ("+", "-"))
    # Bob keeps {1,+,-}, {0,+,-}, {0,1,-}, {0,1,+} after outcomes 1..4.
    return two_round_protocol(e, 0, first, [xb, xb, zb, zb])


def check_thm3_bob() -> ClaimOutcome:
    e = catalog.eq_x1()
    res = two_step_search(e, 1, 2)
    target = {1, 2, 3}
    block = [b for b in res.blocking if set(b.survivors) == target]
    verdict = block[0].three_state if block else None
    ok = (not res.success) and bool(block) and verdict is not None and not verdict.antidistinguishable
    return ClaimOutcome(
        ok,
        {
            "search_success": res.success,
            "blocking_sets": [[e.labels[k] for k in b.survivors] for b in res.blocking if b.responder_x],
            "three_state_check": None if verdict is None else verdict.antidistinguishable,
        },
        "Bob-first fails; conditional set {|+>, |v+>, |v->} is not antidistinguishable",
    )


def check_prop4_alice(eps: float = 0.45) -> ClaimOutcome:
    e = catalog.eq_xanti(eps)
    res = two_step_search(e, 0, 2, strong=True)
    covered = res.verification.covered if res.verification else []
    ok = res.success and len(covered) == 6
    return ClaimOutcome(ok, {"eps": eps, "success": res.success, "covered": [subset_label(s) for s in covered]}, "all six pairs covered")


def check_prop4_bob(eps: float = 0.45) -> ClaimOutcome:
    e = catalog.eq_xanti(eps)
    res = two_step_search(e, 1, 2, strong=True)
    un = [subset_label(s) for s in res.unreachable]
    ok = (not res.success) and un == ["1,4"]
    return ClaimOutcome(ok, {"eps": eps, "success": res.success, "unreachable": un}, "strong search fails; only {phi1, phi4} unreachable")


def check_prop4_threshold() -> ClaimOutcome:
    res = locate_threshold(catalog.bob_xanti, 0.30, 0.50, x=2, tol=1e-3)
    ok = res.lo <= 1 / 3 + 1e-9 <= res.hi + 1e-9 and res.hi - res.lo <= 1e-3
    return ClaimOutcome(
        ok,
        {"threshold": r(res.threshold), "bracket": [r(res.lo), r(res.hi)]},
        "Bob's x = 2 value stops being 1 at eps = 1/3 (bisection bracket to 1e-3)",
    )


def check_prop5() -> ClaimOutcome:
    e = catalog.eq_xanti(1 / 3)
    res = two_step_search(e, 1, 2, strong=True)
    ok = res.success and res.mode == "starter-alone"
    return ClaimOutcome(ok, {"success": res.success, "mode": res.mode}, "Bob alone strongly 2-excludes at eps = 1/3")


def check_thm5() -> ClaimOutcome:
    e = catalog.thm5(2)
    glob = _value(e, 1, strong=True)
    dec = product_locc_antidist_decision(e)
    v = three_state_check_ensemble(e)
    lhs = (sum(v.x) - 1) ** 2
    rhs = 4 * v.x[0] * v.x[1] * v.x[2]
    ok = glob.perfect and bool(glob.strong) and not dec.antidistinguishable and v.antidistinguishable
    return ClaimOutcome(
        ok,
        {"global_value": r(glob.value), "strong": glob.strong, "locc": dec.antidistinguishable, "condition_b": [r(lhs), r(rhs)]},
        "global value 1 and strong; no party antidistinguishes its states",
    )


def check_thm6() -> ClaimOutcome:
    grid = [round(0.30 + 0.01 * i, 2) for i in range(20)]
    vals = [_value(catalog.eq_pbr(cos2theta=c), 2).value for c in grid]
    perfect = [c for c, v in zip(grid, vals) if v >= 1 - 1e-6]
    imperfect = [c for c, v in zip(grid, vals) if v < 1 - 1e-6]
    lo, hi = max(perfect), min(imperfect)
    at41 = _value(catalog.eq_pbr(cos2theta=0.41), 2, strong=True)
    at45 = _value(catalog.eq_pbr(cos2theta=0.45), 2)
    loc = [two_step_search(catalog.eq_pbr(cos2theta=0.41), s, 2).success for s in (0, 1)]
    ok = (
        lo < math.sqrt(2) - 1 < hi
        and at41.value >= 1 - 1e-6
        and bool(at41.strong)
        and at45.value < 1 - 1e-4
        and not any(loc)
    )
    return ClaimOutcome(
        ok,
        {
            "bracket": [lo, hi],
            "value_0.41": r(at41.value),
            "strong_0.41": at41.strong,
            "value_0.45": r(at45.value),
            "structured_locc_0.41": loc,
        },
        "x = 2 value 1 up to cos2theta = sqrt2 - 1; no structured LOCC protocol",
    )


def check_thm7() -> ClaimOutcome:
    e = catalog.eq_pbr(cos2theta=math.cos(math.pi / 4))
    glob = _value(e, 1, strong=True)
    dec = product_locc_antidist_decision(e)
    ok = glob.perfect and bool(glob.strong) and not dec.antidistinguishable
    return ClaimOutcome(
        ok,
        {"value": r(glob.value), "strong": glob.strong, "locc": dec.antidistinguishable,
         "marginal_values": [r(v) for v in dec.marginal_values]},
        "x = 1 value 1, strong, not LOCC antidistinguishable",
    )


def check_prop8() -> ClaimOutcome:
    e = catalog.eq_n2()
    glob = _value(e, 2, strong=True)
    strong2 = two_step_search(e, 0, 2, strong=True)
    weak2 = two_step_search(e, 0, 2)
    strong1 = two_step_search(e, 0, 1, strong=True)
    ok = glob.perfect and bool(glob.strong) and not strong2.success and weak2.success and strong1.success
    return ClaimOutcome(
        ok,
        {
            "global_x2_value": r(glob.value),
            "global_x2_strong": glob.strong,
            "locc_x2_strong": strong2.success,
            "locc_x2": weak2.success,
            "locc_x1_strong": strong1.success,
            "unreachable_x2": [subset_label(s) for s in strong2.unreachable],
        },
        "globally strong x = 2; LOCC x = 2 but not strong; LOCC strong x = 1",
    )


def check_thm9() -> ClaimOutcome:
    scan = bipartition_scan(catalog.eq_pr())
    v = three_state_check(0.25, 0.25, 0.25)
    verdicts = [b.decision.antidistinguishable for b in scan.bipartitions]
    ok = scan.genuine and scan.global_value >= 1 - 1e-6 and not any(verdicts) and v.boundary
    return ClaimOutcome(
        ok,
        {"global_value": r(scan.global_value), "bipartitions": verdicts, "genuine": scan.genuine},
        "global value 1; every bipartition fails",
    )


def _appendix(name: str, tol: float, strong: bool, value_check: Callable[[float], bool], dominance: bool = False) -> ClaimOutcome:
    ens_fn, povm_fn, x = catalog.PRINTED_POVMS[name]
    e = ens_fn()
    rep = _value(e, x, strong=strong, normalization=UNNORMALIZED)
    chk = check_povm(ExclusionTask(e, x, normalization=UNNORMALIZED), povm_fn(), tol)
    ok = value_check(rep.value) and chk.valid and rep.certificate.certified
    measured = {
        "value": r(rep.value),
        "value_unnormalized": r(rep.value_unnormalized),
        "certified": rep.certificate.certified,
        "printed_povm_feasible": chk.valid,
        "printed_povm_value": r(chk.value),
        "printed_povm_completeness_residual": r(chk.feasibility.completeness_residual),
    }
    if strong:
        ok &= bool(rep.strong)
        measured["strong"] = rep.strong
    if dominance:
        ok &= rep.value_unnormalized >= chk.repaired_value - 1e-6
        measured["printed_povm_repaired_value"] = r(chk.repaired_value)
    return ClaimOutcome(ok, measured, f"solver optimum matches; printed POVM feasible at tol {tol:g}")


def check_appendix_a() -> ClaimOutcome:
    out = _appendix("appendix-a", 5e-4, True, lambda v: v >= 1 - 1e-6)
    out.passed &= abs(out.measured["printed_povm_value"] - 1) <= 5e-4
    return out


def check_appendix_b_half() -> ClaimOutcome:
    return _appendix("appendix-b-half", 5e-3, False, lambda v: v < 1 - 1e-3, dominance=True)


def check_appendix_b_third() -> ClaimOutcome:
    return _appendix("appendix-b-third", 5e-3, True, lambda v: v >= 1 - 1e-6)


def check_appendix_c() -> ClaimOutcome:
    return _appendix("appendix-c", 5e-3, True, lambda v: v >= 1 - 1e-6)


CLAIMS: tuple[ReproClaim, ...] = (
    ReproClaim("thm1-sufficiency", "Theorem 1", "per-index antidistinguishable triples give an LOCC protocol", check_thm1),
    ReproClaim("lemma1", "Lemma 1", "explicit strong protocol although {beta1, gamma1} is not antidistinguishable", check_lemma1),
    ReproClaim("thm2-symmetry", "Theorem 2", "x = 1 LOCC verdict does not depend on the starter", check_thm2),
    ReproClaim("thm3-alice-first", "Theorem 3", "2-antidistinguishable when Alice starts", check_thm3_alice),
    ReproClaim("thm3-bob-first", "Theorem 3", "not 2-antidistinguishable when Bob starts", check_thm3_bob),
    ReproClaim("prop4-alice-first", "Proposition 4", "strong x = 2 when Alice starts (eps = 0.45)", check_prop4_alice),
    ReproClaim("prop4-bob-first", "Proposition 4", "strong x = 2 fails when Bob starts (eps = 0.45)", check_prop4_bob),
    ReproClaim("prop4-threshold", "Proposition 4", "Bob's own x = 2 threshold located by bisection", check_prop4_threshold),
    ReproClaim("prop5-bob-alone", "Proposition 5", "Bob alone is strongly 2-antidistinguishing at eps = 1/3", check_prop5),
    ReproClaim("thm5-minimal", "Theorem 5", "three product states, global but not LOCC", check_thm5),
    ReproClaim("thm6-threshold", "Theorem 6", "x = 2 threshold cos2theta = sqrt2 - 1", check_thm6),
    ReproClaim("thm7-pbr", "Theorem 7", "strong global, not LOCC at 2 theta = pi/4", check_thm7),
    ReproClaim("prop8-n2", "Proposition 8", "strong global x = 2 but only weak LOCC x = 2", check_prop8),
    ReproClaim("thm9-genuine", "Theorem 9", "genuine nonlocality across all bipartitions", check_thm9),
    ReproClaim("appendixA", "Appendix A", "Alice's four qubit states, x = 1", check_appendix_a),
    ReproClaim("appendixB-half", "Appendix B", "Bob's states at eps = 1/2, x = 2", check_appendix_b_half),
    ReproClaim("appendixB-third", "Appendix B", "Bob's states at eps = 1/3, x = 2", check_appendix_b_third),
    ReproClaim("appendixC", "Appendix C", "four two-qubit states, x = 2", check_appendix_c),
)

REGISTRY = {c.id: c for c in CLAIMS}


def run_claims(ids: list[str] | None = None) -> list[dict]:
    """Run the named claims (all when ``ids`` is None) in registry order."""
    if ids is None:
        chosen = list(CLAIMS)
    else:
        unknown = [i for i in ids if i not in REGISTRY]
        if unknown:
            raise KeyError(f"unknown claim {unknown[0]!r}; known: {', '.join(REGISTRY)}")
        chosen = [c for c in CLAIMS if c.id in ids]
    return [c.run() for c in chosen]
