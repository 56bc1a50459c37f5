"""Antidistinguishability and x-antidistinguishability of pure-state ensembles.

Global exclusion values come from a small self-contained SDP solver; one-way
LOCC protocols are represented, verified and searched in :mod:`antidist.locc`.
"""

from .analytic import ThreeStateVerdict, equal_overlap_triple, orthogonal_pair_exists, three_state_check
from .exclusion import (
    ExclusionReport,
    ExclusionTask,
    Povm,
    achievable_outcomes,
    check_povm,
    exclusion_value,
    locate_threshold,
    perfect_exclusion_deficit,
    strong_exclusion_check,
)
from .locc import (
    Leaf,
    Node,
    ProtocolError,
    ProtocolTree,
    bipartition_scan,
    product_locc_antidist_decision,
    two_step_search,
    verify_protocol,
)
from .states import Ensemble, ProductState, PureState, StateError, ket, make_named_state

__version__ = "0.1.0"

__all__ = [
    "Ensemble",
    "ExclusionReport",
    "ExclusionTask",
    "Leaf",
    "Node",
    "Povm",
    "ProductState",
    "ProtocolError",
    "ProtocolTree",
    "PureState",
    "StateError",
    "ThreeStateVerdict",
    "achievable_outcomes",
    "bipartition_scan",
    "check_povm",
    "equal_overlap_triple",
    "exclusion_value",
    "ket",
    "locate_threshold",
    "perfect_exclusion_deficit",
    "make_named_state",
    "orthogonal_pair_exists",
    "product_locc_antidist_decision",
    "strong_exclusion_check",
    "three_state_check",
    "two_step_search",
    "verify_protocol",
]
