"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

from __future__ import annotations

import math

import numpy as np
import pytest

from antidist import catalog
from antidist.analytic import three_state_check, three_state_check_ensemble
from antidist.exclusion import (
    UNNORMALIZED,
    ExclusionTask,
    check_povm,
    exclusion_value,
    locate_threshold,
    strong_exclusion_check,
)
from antidist.locc import bipartition_scan, product_locc_antidist_decision, two_step_search, verify_protocol
from antidist.states import Ensemble, PureState, gram

from conftest import random_state, record


def value(e, x=1, strong=False, normalization="normalized"):
    return exclusion_value(ExclusionTask(e, x, strong, normalization))


def verdict(n: int, ok: bool, detail: str) -> None:
    record(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def printed_check(name, tol):
    ens_fn, povm_fn, x = catalog.PRINTED_POVMS[name]
    e = ens_fn()
    return e, x, check_povm(ExclusionTask(e, x, normalization=UNNORMALIZED), povm_fn(), tol)


def test_criterion_01_alice_qubits():
    e, _, chk = printed_check("appendix-a", 5e-4)
    v = value(e).value
    ok = abs(v - 1) <= 1e-6 and chk.valid and abs(chk.value - 1) <= 5e-4
    verdict(1, ok, f"value {v:.9f}; printed POVM feasible {chk.valid}, achieves {chk.value:.6f}")


def test_criterion_02_bob_half():
    e, x, chk = printed_check("appendix-b-half", 5e-3)
    rep = value(e, x, normalization=UNNORMALIZED)
    ok = rep.value < 1 - 1e-3 and chk.valid and rep.value_unnormalized >= chk.repaired_value - 1e-6
    verdict(
        2, ok,
        f"value {rep.value:.6f}; printed N feasible {chk.valid}; optimum {rep.value_unnormalized:.6f} "
        f">= printed (repaired) {chk.repaired_value:.6f}",
    )


def test_criterion_03_bob_third():
    e, x, chk = printed_check("appendix-b-third", 5e-3)
    v = value(e, x).value
    strong = strong_exclusion_check(ExclusionTask(e, x), delta=1e-6).strong
    ok = abs(v - 1) <= 1e-6 and strong and chk.valid
    verdict(3, ok, f"value {v:.9f}; strong {strong}; printed F feasible {chk.valid}")


def test_criterion_04_n2():
    e, x, chk = printed_check("appendix-c", 5e-3)
    rep = value(e, x, strong=True)
    ok = abs(rep.value - 1) <= 1e-6 and bool(rep.strong) and chk.valid
    verdict(4, ok, f"value {rep.value:.9f}; strong {rep.strong}; printed P feasible {chk.valid}")


def test_criterion_05_three_state_oracle():
    rng = np.random.default_rng(5)
    disagree = near = 0
    for _ in range(1000):
        e = Ensemble(tuple(PureState(random_state(rng, 3)) for _ in range(3)))
        v = three_state_check_ensemble(e, tol=0.0)
        if abs(v.margin) <= 1e-7:
            near += 1
            continue
        if v.antidistinguishable != value(e).perfect:
            disagree += 1
    verdict(5, disagree == 0, f"1000 triples: {disagree} disagreements, {near} within 1e-7 of the boundary")


def test_criterion_06_two_state():
    e = Ensemble((PureState([1, 0]), PureState(np.array([1, 1]) / math.sqrt(2))))
    v = value(e).value
    closed = 1 - (1 - 1 / math.sqrt(2)) / 2
    rho = e.density_matrices()
    best = 0.0
    for t in np.deg2rad(np.arange(0, 181, 2)):
        for p in np.deg2rad(np.arange(0, 360, 2)):
            u = np.array([math.cos(t / 2), np.exp(1j * p) * math.sin(t / 2)])
            m = np.outer(u, u.conj())
            # Outcome m excludes state 1, its complement excludes state 2.
            err = 0.5 * np.trace(rho[0] @ m).real + 0.5 * np.trace(rho[1] @ (np.eye(2) - m)).real
            best = max(best, 1 - err, err)
    ok = abs(v - closed) <= 1e-6 and abs(v - best) <= 2e-3
    verdict(6, ok, f"value {v:.9f}; closed form {closed:.9f}; projective grid {best:.6f}")


def test_criterion_07_starter_asymmetry():
    e = catalog.eq_x1()
    a = two_step_search(e, 0, 2)
    rep = verify_protocol(a.protocol, e, 2) if a.protocol is not None else None
    b = two_step_search(e, 1, 2)
    block = [br for br in b.blocking if set(br.survivors) == {1, 2, 3}]
    three = block[0].three_state.antidistinguishable if block and block[0].three_state else None
    ok = a.success and rep is not None and rep.success and not b.success and three is False
    verdict(7, ok, f"A: {a.success} (verified {bool(rep and rep.success)}); B: {b.success}; "
                   f"blocking {{+, v+, v-}} three-state check {three}")


def test_criterion_08_xanti_sweep():
    problems = []
    for eps in (0.36, 0.40, 0.45, 0.50):
        e = catalog.eq_xanti(eps)
        a = two_step_search(e, 0, 2, strong=True)
        b = two_step_search(e, 1, 2, strong=True)
        if not (a.success and verify_protocol(a.protocol, e, 2, strong=True).success):
            problems.append(f"A fails at {eps}")
        if b.success or b.unreachable != [(0, 3)]:
            problems.append(f"B at {eps}: success {b.success}, unreachable {b.unreachable}")
    for eps in (0.20, 0.30, 1 / 3):
        rep = value(catalog.bob_xanti(eps), 2, strong=True)
        if not (rep.perfect and rep.strong):
            problems.append(f"Bob alone at {eps:.4f}: value {rep.value:.6f}, strong {rep.strong}")
    th = locate_threshold(catalog.bob_xanti, 0.30, 0.50, x=2, tol=1e-3)
    # The bracket closes on 1/3 itself: the lower end of the stated range.
    if not th.lo <= 1 / 3 <= th.hi < 1 / 2 or th.hi - th.lo > 1e-3:
        problems.append(f"threshold {th.threshold}")
    verdict(8, not problems, "; ".join(problems) or f"all sweeps as expected; Bob threshold {th.threshold:.5f} "
                                                 f"in [{th.lo:.5f}, {th.hi:.5f}]")


def test_criterion_09_minimal():
    e = catalog.thm5(2)
    v = value(e).value
    dec = product_locc_antidist_decision(e)
    xs = gram(e).triple_x()
    lhs, rhs = (sum(xs) - 1) ** 2, 4 * xs[0] * xs[1] * xs[2]
    ok = v >= 1 - 1e-6 and not dec.antidistinguishable and lhs > rhs and sum(xs) < 1
    verdict(9, ok, f"value {v:.9f}; LOCC {dec.antidistinguishable}; condition (sum-1)^2 = {lhs:.8f} "
                   f"vs 4x1x2x3 = {rhs:.8f}")


def test_criterion_10_pbr_threshold():
    grid = [round(0.30 + 0.01 * i, 2) for i in range(20)]
    vals = {c: value(catalog.eq_pbr(cos2theta=c), 2).value for c in grid}
    lo = max(c for c, v in vals.items() if v >= 1 - 1e-6)
    hi = min(c for c, v in vals.items() if v < 1 - 1e-6)
    ok = abs(vals[0.41] - 1) <= 1e-6 and vals[0.45] < 1 - 1e-4 and lo < math.sqrt(2) - 1 < hi
    verdict(10, ok, f"value(0.41) {vals[0.41]:.9f}; value(0.45) {vals[0.45]:.6f}; bracket [{lo}, {hi}]")


def test_criterion_11_pbr_x1():
    e = catalog.eq_pbr(theta=math.pi / 8)
    rep = value(e, 1, strong=True)
    dec = product_locc_antidist_decision(e)
    ok = rep.perfect and bool(rep.strong) and not dec.antidistinguishable
    verdict(11, ok, f"value {rep.value:.9f}; strong {rep.strong}; LOCC {dec.antidistinguishable}")


def test_criterion_12_genuine():
    scan = bipartition_scan(catalog.eq_pr())
    v = three_state_check(0.25, 0.25, 0.25)
    verdicts = [b.decision.antidistinguishable for b in scan.bipartitions]
    ok = scan.global_value >= 1 - 1e-6 and v.boundary and len(verdicts) == 3 and not any(verdicts) and scan.genuine
    verdict(12, ok, f"value {scan.global_value:.9f}; bipartitions {verdicts}; genuine {scan.genuine}")


def test_criterion_13_properties():
    rng = np.random.default_rng(13)
    problems = []
    ensembles = [catalog.eq_x1(), catalog.eq_n2(), catalog.eq_xanti(0.4), catalog.eq_pbr(cos2theta=0.43)]
    for n, d in [(3, 2), (4, 3), (5, 3), (4, 4), (5, 5)]:
        ensembles.append(Ensemble(tuple(PureState(random_state(rng, d)) for _ in range(n))))
    solves = 0
    for e in ensembles:
        prev = None
        for x in range(1, e.n):
            rep = value(e, x)
            solves += 1
            if rep.certificate.gap < -1e-9:
                problems.append(f"gap {rep.certificate.gap:.2e}")
            if rep.povm.completeness_residual() > 1e-8:
                problems.append(f"residual {rep.povm.completeness_residual():.2e}")
            if prev is not None and rep.value > prev + 1e-8:
                problems.append(f"x-monotonicity {prev} < {rep.value}")
            prev = rep.value
    protocols = 0
    for e in ensembles[:4]:
        glob = {x: value(e, x).value for x in (1, 2)}
        for s in (0, 1):
            for x in (1, 2):
                for strong in (False, True):
                    res = two_step_search(e, s, x, strong)
                    if res.success:
                        protocols += 1
                        if not verify_protocol(res.protocol, e, x, strong).success or glob[x] < 1 - 1e-6:
                            problems.append(f"dominance at x={x} starter {s}")
    verdict(13, not problems, "; ".join(problems[:5]) or f"{solves} solves, {protocols} protocols checked")
