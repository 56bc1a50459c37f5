from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from antidist import catalog
from antidist.exclusion import (
    UNNORMALIZED,
    ExclusionTask,
    achievable_outcomes,
    check_povm,
    exclusion_value,
    locate_threshold,
    parse_subset_label,
    strong_exclusion_check,
    subset_label,
    subsets,
    theorem5_family,
)
from antidist.states import Ensemble, PureState, StateError, make_named_state as ns

from conftest import random_state


def value(e, x=1, strong=False):
    return exclusion_value(ExclusionTask(e, x, strong))


def random_ensemble(rng, n, d):
    return Ensemble(tuple(PureState(random_state(rng, d)) for _ in range(n)))


def test_labels():
    assert subsets(4, 2)[0] == (0, 1) and len(subsets(4, 2)) == 6
    assert subset_label((0, 2)) == "1,3"
    assert parse_subset_label("13") == (0, 2) == parse_subset_label("{1,3}")
    with pytest.raises(ValueError):
        parse_subset_label("a,b")


def test_task_validation():
    e = Ensemble((ns("0"), ns("1")))
    with pytest.raises(ValueError):
        ExclusionTask(e, 2)
    with pytest.raises(ValueError):
        ExclusionTask(e, 1, normalization="other")


def test_identical_states_half():
    rep = value(Ensemble((ns("0"), ns("0"))))
    assert rep.value == pytest.approx(0.5, abs=1e-7)


def test_two_state_closed_form_and_grid():
    e = Ensemble((ns("0"), ns("+")))
    rep = value(e)
    closed = 1 - (1 - 1 / math.sqrt(2)) / 2
    assert rep.value == pytest.approx(closed, abs=1e-6)
    best = 0.0
    rho = e.density_matrices()
    for t in np.deg2rad(np.arange(0, 181, 2)):
        for p in np.deg2rad(np.arange(0, 360, 2)):
            u = np.array([math.cos(t / 2), np.exp(1j * p) * math.sin(t / 2)])
            proj = np.outer(u, u.conj())
            for a, b in ((proj, np.eye(2) - proj), (np.eye(2) - proj, proj)):
                err = 0.5 * np.trace(rho[0] @ a).real + 0.5 * np.trace(rho[1] @ b).real
                best = max(best, 1 - err)
    assert abs(best - rep.value) <= 2e-3
    assert best <= rep.value + 1e-9


def _oracle_value(e, x, restarts, rng):
    """Best value over POVMs parametrized as S^-1/2 A_k A_k^dag S^-1/2 (local search)."""
    labels = subsets(e.n, x)
    d = e.dim
    rho = e.density_matrices()
    cost = [sum(e.priors[k] * rho[k] for k in s) for s in labels]
    m = len(labels)

    def povm(theta):
        a = theta[: m * d * d].reshape(m, d, d) + 1j * theta[m * d * d :].reshape(m, d, d)
        raw = [ak @ ak.conj().T for ak in a]
        w, v = np.linalg.eigh(sum(raw))
        t = (v / np.sqrt(w)) @ v.conj().T
        return [t @ r @ t for r in raw]

    def err(theta):
        return sum(np.trace(c @ mk).real for c, mk in zip(cost, povm(theta)))

    best = 0.0
    for _ in range(restarts):
        res = minimize(err, rng.normal(size=2 * m * d * d), method="BFGS")
        best = max(best, 1 - res.fun)
    return best


def test_qubit_triples_against_local_search(rng):
    for _ in range(6):
        e = random_ensemble(rng, 3, 2)
        rep = value(e)
        oracle = _oracle_value(e, 1, 6, rng)
        assert rep.value >= oracle - 1e-7
        assert rep.value <= oracle + 1e-4


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_against_cvxpy(rng):
    cp = pytest.importorskip("cvxpy")
    for n, d, x in [(3, 2, 1), (4, 3, 1), (4, 3, 2), (4, 4, 2), (5, 3, 3)]:
        e = random_ensemble(rng, n, d)
        labels = subsets(n, x)
        rho = e.density_matrices()
        ms = [cp.Variable((d, d), hermitian=True) for _ in labels]
        obj = sum(cp.real(cp.trace(sum(e.priors[k] * rho[k] for k in s) @ m)) for s, m in zip(labels, ms))
        prob = cp.Problem(cp.Minimize(obj), [m >> 0 for m in ms] + [sum(ms) == np.eye(d)])
        prob.solve(solver="CLARABEL" if "CLARABEL" in cp.installed_solvers() else None)
        assert value(e, x).value == pytest.approx(1 - prob.value, abs=1e-6)


def test_perfect_but_not_strong():
    e = Ensemble((ns("0"), ns("1"), ns("+")))
    rep = value(e, strong=True)
    assert rep.perfect and rep.strong is False
    ach = achievable_outcomes(e, 1)
    assert ach.achievable == [(0,), (1,)]


def test_orthogonal_pair_is_strong():
    assert value(Ensemble((ns("0"), ns("1"))), strong=True).strong


def test_nonorthogonal_perfect_implies_strong(rng):
    seen = 0
    for _ in range(30):
        e = random_ensemble(rng, 3, 3)
        rep = value(e)
        if rep.perfect:
            seen += 1
            assert strong_exclusion_check(ExclusionTask(e, 1)).strong
    assert seen > 0


def test_bob_family_strong_regions():
    for eps in (0.2, 0.3, 1 / 3):
        rep = value(catalog.bob_xanti(eps), x=2, strong=True)
        assert rep.perfect and rep.strong
    rep = value(catalog.bob_xanti(0.45), x=2, strong=True)
    assert not rep.perfect and rep.strong is False


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_x_monotone_duality_completeness(seed, d):
    e = random_ensemble(np.random.default_rng(seed), 4, d)
    values = []
    for x in (1, 2, 3):
        rep = value(e, x)
        assert rep.certificate.gap >= -1e-9
        assert rep.povm.completeness_residual() <= 1e-8
        values.append(rep.value)
    assert values[0] >= values[1] - 1e-8 >= values[2] - 2e-8


def test_unnormalized_relation(rng):
    e = random_ensemble(rng, 4, 3)
    rep = exclusion_value(ExclusionTask(e, 1, normalization=UNNORMALIZED))
    assert rep.value_unnormalized == pytest.approx(1 - 4 * (1 - rep.value), abs=1e-9)


def test_minimal_family():
    for d in (2, 3):
        rep = value(theorem5_family(d), strong=True)
        assert rep.perfect and rep.strong
    with pytest.raises(StateError):
        theorem5_family(2, r=[0.5])
    with pytest.raises(StateError):
        theorem5_family(1)


def test_check_povm_on_printed_qubit_povm():
    e = catalog.alice_x1_set()
    chk = check_povm(ExclusionTask(e, 1, normalization=UNNORMALIZED), catalog.alice_x1_povm(), 5e-4)
    assert chk.valid and chk.value == pytest.approx(1, abs=5e-4)
    assert max(chk.annihilation.values()) <= 1e-8
    assert not check_povm(ExclusionTask(e, 1), catalog.alice_x1_povm(), 1e-6).valid


def test_check_povm_rejects_wrong_labels():
    e = catalog.alice_x1_set()
    with pytest.raises(ValueError):
        check_povm(ExclusionTask(e, 2), catalog.alice_x1_povm(), 1e-3)


def test_locate_threshold_requires_bracket():
    with pytest.raises(ValueError):
        locate_threshold(catalog.bob_xanti, 0.4, 0.5, x=2)
    res = locate_threshold(catalog.bob_xanti, 0.2, 0.5, x=2, tol=1e-4)
    assert res.lo <= 1 / 3 <= res.hi
