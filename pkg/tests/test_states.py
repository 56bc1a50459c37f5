from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antidist import states
from antidist.states import Ensemble, ProductState, PureState, StateError, make_named_state as ns


def test_autonormalize_and_reject():
    assert np.isclose(np.linalg.norm(PureState([1, 1e-7 + 0j]).vector), 1)
    PureState([1 + 5e-7, 0])
    with pytest.raises(StateError):
        PureState([1, 1])
    with pytest.raises(StateError):
        PureState([0, 0])


def test_named_states():
    assert abs(states.overlap(ns("0"), ns("+"))) == pytest.approx(1 / math.sqrt(2))
    assert abs(states.overlap(ns("+"), ns("-"))) == pytest.approx(0, abs=1e-15)
    # |v+> and |v-> make 60 degree angles with |0>
    assert abs(states.overlap(ns("0"), ns("v+"))) == pytest.approx(0.5)
    assert abs(states.overlap(ns("0"), ns("v-"))) == pytest.approx(0.5)
    assert abs(states.overlap(ns("eta1"), ns("0"))) == pytest.approx(math.cos(math.pi / 6))
    t = 0.3
    assert states.overlap(ns("plus_theta", t), ns("minus_theta", t)).real == pytest.approx(math.cos(2 * t))
    with pytest.raises(StateError):
        ns("nope")
    with pytest.raises(StateError):
        ns("plus_theta", 2.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99))
def test_bob_family_equal_overlaps(eps):
    vecs = [ns(f"phi{k}_bob", eps) for k in range(1, 5)]
    for i in range(4):
        assert np.linalg.norm(vecs[i].vector) == pytest.approx(1, abs=1e-12)
        for j in range(i + 1, 4):
            assert states.overlap(vecs[i], vecs[j]).real == pytest.approx(eps, abs=1e-12)


def test_ensemble_defaults_and_errors():
    e = Ensemble((ns("0"), ns("1")))
    assert e.labels == ("1", "2")
    assert np.allclose(e.priors, [0.5, 0.5])
    assert e.dims == (2,)
    with pytest.raises(StateError):
        Ensemble((ns("0"),))
    with pytest.raises(StateError):
        Ensemble((ns("0"), ns("1")), priors=[0.3, 0.3])
    with pytest.raises(StateError):
        Ensemble((ns("0"), PureState([1, 0, 0])))


def test_product_structure():
    p = ProductState((ns("0"), ns("+")))
    assert p.dims == (2, 2)
    assert np.allclose(p.vector, np.kron([1, 0], [1, 1]) / math.sqrt(2))
    e = Ensemble((p, ProductState((ns("1"), ns("0")))))
    assert e.is_product and e.n_parties == 2
    m = states.marginal_set(e, 1)
    assert np.allclose(m.states[0].vector, ns("+").vector)
    with pytest.raises(StateError):
        states.marginal_set(e, 2)


def test_group_by_bipartition_and_list():
    parts = [("0", "0", "0"), ("0", "+", "+"), ("+", "+", "0")]
    e = Ensemble(tuple(ProductState(tuple(ns(c) for c in t)) for t in parts))
    assert states.bipartitions(3) == [(0,), (0, 1), (0, 2)]
    assert len(states.bipartitions(4)) == 7
    g = states.group_by_bipartition(e, (1, 2))
    assert g.dims == (4, 2)
    # same global vectors up to the party permutation
    assert np.allclose(np.abs(np.array(g.vectors()) @ np.array(g.vectors()).conj().T),
                       np.abs(np.array(e.vectors()) @ np.array(e.vectors()).conj().T))
    with pytest.raises(StateError):
        states.group_by_bipartition(e, (0, 1, 2))


def test_bipartite_components():
    r = 1 / math.sqrt(2)
    psi = PureState([0, r, r, 0])
    comps = states.bipartite_components(psi, (2, 2))
    assert np.allclose(comps[0], [0, r]) and np.allclose(comps[1], [r, 0])


def test_gram_triple():
    e = Ensemble((ns("0"), ns("+"), ns("1")))
    assert states.gram(e).triple_x() == pytest.approx((0.5, 0.0, 0.5))
