"""One-way LOCC exclusion protocols: representation, verification and search."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence, Union

import numpy as np

from . import linalg, sdp
from .analytic import ThreeStateVerdict, orthogonal_pair_exists, three_state_check_ensemble
from .exclusion import (
    NULL_TRACE,
    ExclusionTask,
    Subset,
    achievable_outcomes,
    exclusion_value,
    reduced_povm_problem,
    subset_label,
    subsets,
)
from .states import Ensemble, PureState, StateError, bipartitions, group_by_bipartition, marginal_set

PROB_TOL = 1e-9
POVM_TOL = 1e-8
COMPLETE_TOL = 1e-7
PARALLEL_TOL = 1e-9


class ProtocolError(ValueError):
    """A protocol is malformed or claims an exclusion it does not achieve."""


@dataclass(frozen=True)
class Leaf:
    exclude: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class Node:
    party: int
    povm: tuple[np.ndarray, ...]
    children: tuple["Node | Leaf", ...]


Tree = Union[Node, Leaf]
Path = tuple[tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class ProtocolTree:
    root: Tree
    dims: tuple[int, ...]
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.order is None:
            seen: list[int] = []
            node = self.root
            while isinstance(node, Node):
                if node.party not in seen:
                    seen.append(node.party)
                node = node.children[0] if node.children else Leaf()
            rest = [p for p in range(len(self.dims)) if p not in seen]
            object.__setattr__(self, "order", tuple(seen + rest))

    def leaves(self) -> Iterator[tuple[Path, tuple[np.ndarray, ...], Leaf]]:
        """Yield ``(path, operators, leaf)``; ``path`` pairs party with outcome index."""

        def walk(node, path, ops):
            if isinstance(node, Leaf):
                yield path, ops, node
                return
            for i, child in enumerate(node.children):
                yield from walk(child, path + ((node.party, i),), ops + (node.povm[i],))

        yield from walk(self.root, (), ())


def path_label(path: Path) -> str:
    if not path:
        return "root"
    return " > ".join(f"P{p}:{i}" for p, i in path)


def _apply_local(vec: np.ndarray, dims: Sequence[int], party: int, op: np.ndarray) -> np.ndarray:
    t = vec.reshape(dims)
    t = np.moveaxis(np.tensordot(op, t, axes=([1], [party])), 0, party)
    return t.reshape(-1)


def branch_probability(vec: np.ndarray, dims: Sequence[int], path: Path, ops: Sequence[np.ndarray]) -> float:
    """``<psi| (x)_visited M |psi>`` with the identity on unvisited parties."""
    w = vec
    for (party, _), op in zip(path, ops):
        w = _apply_local(w, dims, party, op)
    return float(np.vdot(vec, w).real)


def _check_node(node: Node, dims: Sequence[int], where: str, tol: float) -> None:
    if not 0 <= node.party < len(dims):
        raise ProtocolError(f"{where}: party {node.party} out of range for {len(dims)} parties")
    d = dims[node.party]
    if len(node.povm) != len(node.children):
        raise ProtocolError(f"{where}: {len(node.povm)} POVM elements but {len(node.children)} children")
    if not node.povm:
        raise ProtocolError(f"{where}: empty POVM")
    total = np.zeros((d, d), complex)
    for i, m in enumerate(node.povm):
        if m.shape != (d, d):
            raise ProtocolError(f"{where}: element {i} has shape {m.shape}, party {node.party} has dimension {d}")
        try:
            lo = linalg.eigvalsh(m, tol=max(tol, linalg.HERMITIAN_TOL))[0]
        except linalg.NotHermitianError as exc:
            raise ProtocolError(f"{where}: element {i} is not Hermitian ({exc})") from None
        if lo < -tol:
            raise ProtocolError(f"{where}: element {i} has eigenvalue {lo:.3e} < 0")
        total = total + m
    res = float(np.max(np.abs(total - np.eye(d))))
    if res > tol:
        raise ProtocolError(f"{where}: POVM of party {node.party} is incomplete (residual {res:.3e})")


@dataclass
class LeafReport:
    path: Path
    claims: tuple[int, ...]
    probabilities: list[float]
    pruned: bool

    def to_dict(self) -> dict:
        return {
            "path": [[p, i] for p, i in self.path],
            "exclude": [k + 1 for k in self.claims],
            "probabilities": [float(f"{p:.15g}") for p in self.probabilities],
            "pruned": self.pruned,
        }


@dataclass
class ProtocolReport:
    success: bool
    strong_success: bool
    x: int
    leaves: list[LeafReport]
    covered: list[Subset]
    missing: list[Subset]
    short_leaves: list[Path] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "strong_success": self.strong_success,
            "x": self.x,
            "covered": [subset_label(s) for s in self.covered],
            "missing": [subset_label(s) for s in self.missing],
            "short_leaves": [path_label(p) for p in self.short_leaves],
            "leaves": [leaf.to_dict() for leaf in self.leaves],
        }


def verify_protocol(
    tree: ProtocolTree,
    e: Ensemble,
    x: int = 1,
    strong: bool = False,
    tol: float = PROB_TOL,
    povm_tol: float = POVM_TOL,
) -> ProtocolReport:
    """Check every leaf's exclusion claims against the branch probabilities.

    A claim that state ``k`` is excluded on a branch is valid when the
    probability of that branch given ``k`` is at most ``tol``.  Branches that
    no state can reach are pruned.  Raises :class:`ProtocolError` for
    malformed trees and invalid claims.  ``strong`` only affects the
    returned ``success`` (which then requires coverage of every x-subset).
    """
    if tuple(tree.dims) != tuple(e.dims):
        raise ProtocolError(f"protocol party dimensions {tree.dims} do not match ensemble {e.dims}")
    if not 1 <= x <= e.n - 1:
        raise ProtocolError(f"x = {x} must lie in [1, {e.n - 1}]")
    order = tree.order
    if sorted(order) != list(range(len(e.dims))):
        raise ProtocolError(f"party order {order} is not a permutation of 0..{len(e.dims) - 1}")
    rank = {p: i for i, p in enumerate(order)}

    def check(node, path):
        if isinstance(node, Leaf):
            return
        where = path_label(path)
        _check_node(node, e.dims, where, povm_tol)
        visited = [p for p, _ in path]
        if node.party in visited:
            raise ProtocolError(f"{where}: party {node.party} measures twice on one branch")
        if visited and rank[node.party] < rank[visited[-1]]:
            raise ProtocolError(f"{where}: party {node.party} acts out of the order {order}")
        for i, child in enumerate(node.children):
            check(child, path + ((node.party, i),))

    check(tree.root, ())
    vecs = e.vectors()
    leaves = []
    covered: set[Subset] = set()
    short = []
    for path, ops, leaf in tree.leaves():
        probs = [branch_probability(v, e.dims, path, ops) for v in vecs]
        pruned = max(probs) <= tol
        claims = tuple(sorted(set(leaf.exclude)))
        for k in claims:
            if not 0 <= k < e.n:
                raise ProtocolError(f"branch {path_label(path)}: claimed state index {k + 1} out of range")
            if probs[k] > tol:
                raise ProtocolError(
                    f"branch {path_label(path)}: state {e.labels[k]} is not excluded "
                    f"(branch probability {probs[k]:.3e} > {tol:g})"
                )
        leaves.append(LeafReport(path, claims, probs, pruned))
        if pruned:
            continue
        if len(claims) < x:
            short.append(path)
        covered.update(combinations(claims, x))
    everything = subsets(e.n, x)
    missing = [s for s in everything if s not in covered]
    success = not short
    strong_success = success and not missing
    return ProtocolReport(
        success=strong_success if strong else success,
        strong_success=strong_success,
        x=x,
        leaves=leaves,
        covered=sorted(covered),
        missing=missing,
        short_leaves=short,
    )


def _claims(e: Ensemble, path: Path, ops: Sequence[np.ndarray], tol: float) -> tuple[int, ...]:
    return tuple(k for k, v in enumerate(e.vectors()) if branch_probability(v, e.dims, path, ops) <= tol)


def attach_claims(root: Tree, e: Ensemble, tol: float = PROB_TOL) -> ProtocolTree:
    """Fill every leaf with all states whose branch probability is at most ``tol``."""

    def rebuild(node, path, ops):
        if isinstance(node, Leaf):
            return Leaf(_claims(e, path, ops, tol))
        kids = tuple(
            rebuild(c, path + ((node.party, i),), ops + (node.povm[i],)) for i, c in enumerate(node.children)
        )
        return Node(node.party, tuple(node.povm), kids)

    return ProtocolTree(rebuild(root, (), ()), tuple(e.dims))


def two_round_protocol(
    e: Ensemble,
    first: int,
    first_povm: Sequence[np.ndarray],
    second_povms: Sequence[Sequence[np.ndarray] | None],
    tol: float = PROB_TOL,
) -> ProtocolTree:
    """Party ``first`` measures; on outcome ``i`` the other party of a bipartite
    system measures ``second_povms[i]`` (``None`` ends the branch).  Leaf claims
    are computed from the branch probabilities."""
    if len(e.dims) != 2:
        raise StateError("two_round_protocol needs a bipartite ensemble")
    other = 1 - first
    kids = []
    for i, _ in enumerate(first_povm):
        sub = second_povms[i] if i < len(second_povms) else None
        if sub is None:
            kids.append(Leaf())
        else:
            ops = tuple(np.asarray(m, complex) for m in sub)
            kids.append(Node(other, ops, tuple(Leaf() for _ in ops)))
    root = Node(first, tuple(np.asarray(m, complex) for m in first_povm), tuple(kids))
    return attach_claims(root, e, tol)


# Decision rule for product ensembles and x = 1.


@dataclass
class LoccDecision:
    antidistinguishable: bool
    witness_party: int | None
    marginal_values: list[float]
    statuses: list[str]

    def to_dict(self) -> dict:
        return {
            "antidistinguishable": self.antidistinguishable,
            "witness_party": self.witness_party,
            "marginal_values": [float(f"{v:.15g}") for v in self.marginal_values],
            "statuses": self.statuses,
        }


def _require_product(e: Ensemble, what: str) -> None:
    if not e.is_product:
        raise StateError(
            f"{what} needs product states: the local-marginal criterion only applies when "
            "every state factorizes across the parties"
        )


def product_locc_antidist_decision(e: Ensemble) -> LoccDecision:
    """LOCC antidistinguishability (x = 1) of a product ensemble.

    True iff some party can antidistinguish its own local states, which makes
    the verdict independent of who starts.
    """
    _require_product(e, "product_locc_antidist_decision")
    values = []
    statuses = []
    witness = None
    for p in range(e.n_parties):
        rep = exclusion_value(ExclusionTask(marginal_set(e, p), 1))
        values.append(rep.value)
        statuses.append(rep.status)
        if witness is None and rep.perfect:
            witness = p
    return LoccDecision(witness is not None, witness, values, statuses)


# Structured two-round search.


@dataclass
class BranchReport:
    """One starter outcome type: the states it excludes and what the responder faces."""

    excluded: tuple[int, ...]
    survivors: tuple[int, ...]
    responder_x: int
    responder_value: float | None
    good: bool
    three_state: ThreeStateVerdict | None = None
    orthogonal_pair: tuple[int, int] | None = None
    reachable: list[Subset] = field(default_factory=list)
    responder_povm: list[np.ndarray] | None = None

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        name = (lambda k: labels[k]) if labels else (lambda k: str(k + 1))
        out = {
            "excluded_by_starter": [name(k) for k in self.excluded],
            "responder_set": [name(k) for k in self.survivors],
            "responder_x": self.responder_x,
            "responder_value": None if self.responder_value is None else float(f"{self.responder_value:.15g}"),
            "good": self.good,
            "reachable": [subset_label(s) for s in self.reachable],
        }
        if self.three_state is not None:
            v = self.three_state
            out["three_state_check"] = {
                "antidistinguishable": v.antidistinguishable,
                "condition_a": v.condition_a,
                "condition_b": v.condition_b,
                "boundary": v.boundary,
                "x": [float(f"{t:.15g}") for t in v.x],
            }
        if self.orthogonal_pair is not None:
            out["orthogonal_pair"] = [name(self.survivors[i]) for i in self.orthogonal_pair]
        return out


@dataclass
class SearchResult:
    success: bool
    x: int
    starter: int
    strong: bool
    mode: str | None
    protocol: ProtocolTree | None
    verification: ProtocolReport | None
    starter_value: float | None
    branches: list[BranchReport]
    unreachable: list[Subset]
    message: str
    certified_impossible: bool = False

    @property
    def blocking(self) -> list[BranchReport]:
        return [b for b in self.branches if not b.good]

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        from .io import protocol_to_dict

        return {
            "success": self.success,
            "x": self.x,
            "starter": self.starter,
            "strong": self.strong,
            "mode": self.mode,
            "message": self.message,
            "certified_impossible": self.certified_impossible,
            "starter_value": None if self.starter_value is None else float(f"{self.starter_value:.15g}"),
            "branches": [b.to_dict(labels) for b in self.branches],
            "blocking": [b.to_dict(labels) for b in self.blocking],
            "unreachable": [subset_label(s) for s in self.unreachable],
            "protocol": None if self.protocol is None else protocol_to_dict(self.protocol),
            "verification": None if self.verification is None else self.verification.to_dict(),
        }


def _outcome_types(local: Sequence[np.ndarray]) -> list[tuple[int, ...]]:
    """Sets of states sharing one local vector, plus the empty remainder type."""
    types: list[tuple[int, ...]] = []
    for k, a in enumerate(local):
        e = tuple(j for j, b in enumerate(local) if abs(np.vdot(a, b)) >= 1 - PARALLEL_TOL)
        if e not in types:
            types.append(e)
    types.append(())
    return types


def _responder_branch(resp: Ensemble, excluded, survivors, need, want_povm: bool) -> BranchReport:
    if need <= 0:
        return BranchReport(tuple(excluded), tuple(survivors), 0, None, True)
    verdict = None
    pair = None
    if len(survivors) == 3 and need == 1:
        verdict = three_state_check_ensemble(resp)
    if need == 1:
        pair = orthogonal_pair_exists(resp)
    if need >= len(survivors):
        return BranchReport(tuple(excluded), tuple(survivors), need, 0.0, False, verdict, pair)
    rep = exclusion_value(ExclusionTask(resp, need))
    br = BranchReport(tuple(excluded), tuple(survivors), need, rep.value, rep.perfect, verdict, pair)
    if rep.perfect:
        ach = achievable_outcomes(resp, need)
        if not ach.feasible or ach.witness is None:
            br.good = False
            return br
        br.reachable = sorted(
            {tuple(sorted(set(excluded) | {survivors[f] for f in s})) for s in ach.achievable}
        )
        if want_povm:
            br.responder_povm = [ach.witness.outcomes[s] for s in ach.witness.labels()]
    return br


def _complete_with(dim: int, maps: Sequence[np.ndarray], good: Sequence[bool]) -> float:
    """Least weight a starter POVM must put on bad types; zero means complete."""
    blocks = [(f"type{b}", v.shape[1]) for b, v in enumerate(maps)]
    costs = [
        (np.zeros((v.shape[1],) * 2, complex) if g else np.eye(v.shape[1], dtype=complex))
        for v, g in zip(maps, good)
    ]
    p = sdp.SdpProblem(blocks, costs, completeness=sdp.Completeness(dim, dict(enumerate(maps))))
    sol = sdp.solve(p)
    return max(0.0, sol.primal_value)


def _starter_povm(dim: int, maps: Sequence[np.ndarray], support: np.ndarray) -> list[np.ndarray] | None:
    """Average of per-type max-weight POVMs; every achievable type is non-null in it."""
    names = [f"type{b}" for b in range(len(maps))]
    sols = []
    for b in range(len(maps)):
        prob = reduced_povm_problem(dim, maps, names, "target", target=b, weight=support)
        try:
            sol = sdp.solve(prob)
        except sdp.StructurallyInfeasibleError:
            return None
        if sol.status == sdp.INFEASIBLE:
            return None
        lifted = [v @ blk @ v.conj().T for v, blk in zip(maps, sol.blocks)]
        if np.max(np.abs(sum(lifted) - np.eye(dim))) > 1e-6:
            return None
        if float(np.vdot(support, lifted[b]).real) > NULL_TRACE:
            sols.append(lifted)
    if not sols:
        return None
    return [linalg.hermitian_part(sum(s[b] for s in sols) / len(sols)) for b in range(len(maps))]


def _span_projector(vectors: Sequence[np.ndarray], dim: int) -> np.ndarray:
    v = linalg.orthocomplement(list(vectors), dim)
    return np.eye(dim) - v @ v.conj().T


def _finish(e, x, starter, strong, mode, root, branches, starter_value, potential) -> SearchResult:
    tree = attach_claims(root, e)
    report = verify_protocol(tree, e, x, strong)
    everything = subsets(e.n, x)
    unreachable = [s for s in everything if s not in potential and s not in report.covered]
    if report.success:
        return SearchResult(True, x, starter, strong, mode, tree, report, starter_value, branches, [], "protocol found")
    if report.short_leaves:
        msg = f"a branch excludes fewer than {x} states"
    else:
        msg = "not every pair is reached" if x == 2 else f"not every {x}-subset is reached"
    return SearchResult(False, x, starter, strong, mode, tree, report, starter_value, branches, unreachable, msg)


def two_step_search(e: Ensemble, starter: int = 0, x: int = 1, strong: bool = False) -> SearchResult:
    """Search the structured two-round family with ``starter`` measuring first.

    Two protocol shapes are tried.  Either the starter x-excludes on its own
    local states, or the starter plays a single-state exclusion measurement
    (each element orthogonal to one local state, plus a remainder element)
    and the responder finishes on the surviving states.  Failure means no
    protocol of that shape exists; for ``x = 1`` on product states it is
    certified impossibility (see :func:`product_locc_antidist_decision`).
    Entangled bipartite ensembles are handled for ``x = 1`` by a
    computational-basis first measurement.
    """
    if e.n_parties != 2:
        raise StateError(f"two_step_search needs a bipartite ensemble, got {e.n_parties} parties")
    if starter not in (0, 1):
        raise StateError(f"starter must be party 0 or 1, got {starter}")
    if not 1 <= x <= e.n - 1:
        raise ValueError(f"x = {x} must lie in [1, {e.n - 1}] for {e.n} states")
    if not e.is_product:
        if x != 1:
            raise StateError("the structured search handles entangled states only for x = 1")
        return basis_first_search(e, starter, strong)
    responder = 1 - starter
    m_a = marginal_set(e, starter)
    m_b = marginal_set(e, responder)
    d_a = e.dims[starter]
    everything = subsets(e.n, x)
    potential: set[Subset] = set()

    # Shape 1: the starter alone.
    own = exclusion_value(ExclusionTask(m_a, x))
    starter_value = own.value
    own_result = None
    if own.perfect:
        ach = achievable_outcomes(m_a, x)
        if ach.feasible and ach.witness is not None:
            potential.update(ach.achievable)
            ops = tuple(ach.witness.outcomes[s] for s in ach.witness.labels())
            root = Node(starter, ops, tuple(Leaf() for _ in ops))
            own_result = _finish(e, x, starter, strong, "starter-alone", root, [], starter_value, potential)
            if own_result.success:
                return own_result

    # Shape 2: single-state exclusion by the starter, responder finishes.
    local = [v.vector for v in m_a.states]
    types = _outcome_types(local)
    maps = [linalg.orthocomplement([local[k] for k in t], d_a) if t else np.eye(d_a, dtype=complex) for t in types]
    branches = []
    for t, v in zip(types, maps):
        survivors = tuple(k for k in range(e.n) if k not in t)
        need = x - len(t)
        if v.shape[1] == 0:
            br = BranchReport(t, survivors, max(need, 0), None, False)
        elif need <= 0:
            br = _responder_branch(None, t, survivors, need, False)
            br.reachable = sorted(combinations(t, x))
        else:
            br = _responder_branch(m_b.subset(survivors), t, survivors, need, True)
        branches.append(br)
        if br.good:
            for g in br.reachable:
                potential.update(combinations(g, x))
    good = [b.good for b in branches]
    unreachable = [s for s in everything if s not in potential]

    def failure(msg: str) -> SearchResult:
        if own_result is not None:
            own_result.branches = branches
            own_result.unreachable = unreachable
            own_result.message = msg
            return own_result
        certified = x == 1 and not strong
        if certified:
            msg += "; no party can antidistinguish its local states, so no LOCC protocol exists"
        else:
            msg += "; no protocol in structured family"
        return SearchResult(False, x, starter, strong, None, None, None, starter_value, branches, unreachable, msg, certified)

    if not any(good):
        return failure("no starter outcome leaves the responder a solvable task")
    usable = [i for i, g in enumerate(good) if g and maps[i].shape[1]]
    deficit = _complete_with(d_a, maps, good)
    if deficit > COMPLETE_TOL:
        return failure(f"the starter cannot complete a measurement from good outcomes (residual weight {deficit:.3e})")
    support = _span_projector(local, d_a)
    pov = _starter_povm(d_a, [maps[i] for i in usable], support)
    if pov is None:
        return failure("the starter cannot complete a measurement from good outcomes")
    kids = []
    for i, op in zip(usable, pov):
        br = branches[i]
        if br.responder_povm is None:
            kids.append(Leaf())
        else:
            ops = tuple(br.responder_povm)
            kids.append(Node(responder, ops, tuple(Leaf() for _ in ops)))
    root = Node(starter, tuple(pov), tuple(kids))
    result = _finish(e, x, starter, strong, "two-step", root, branches, starter_value, potential)
    if not result.success and own_result is not None and own_result.verification is not None:
        result.unreachable = [s for s in result.unreachable if s not in own_result.verification.covered]
    if not result.success:
        result.message += "; no protocol in structured family"
    return result


def basis_first_search(e: Ensemble, starter: int = 0, strong: bool = False, tol: float = PROB_TOL) -> SearchResult:
    """x = 1 protocol where the starter measures its computational basis.

    Works for entangled states: on outcome ``i`` the responder holds the pure
    states ``(<i| (x) I)|psi_k>``; those of zero norm are already excluded.
    """
    if e.n_parties != 2:
        raise StateError("basis_first_search needs a bipartite ensemble")
    responder = 1 - starter
    d_a, d_b = e.dims[starter], e.dims[responder]
    branches = []
    kids = []
    ops = []
    for i in range(d_a):
        p = np.zeros((d_a, d_a), complex)
        p[i, i] = 1.0
        ops.append(p)
        cond = []
        for v in e.vectors():
            t = v.reshape(e.dims)
            cond.append(t[i, :] if starter == 0 else t[:, i])
        norms = [float(np.vdot(c, c).real) for c in cond]
        gone = tuple(k for k, nrm in enumerate(norms) if nrm <= tol)
        alive = tuple(k for k in range(e.n) if k not in gone)
        if gone or not alive:
            branches.append(BranchReport(gone, alive, 0, None, True, reachable=[(k,) for k in gone]))
            kids.append(Leaf())
            continue
        if len(alive) < 2:
            branches.append(BranchReport(gone, alive, 1, 0.0, False))
            kids.append(Leaf())
            continue
        resp = Ensemble(tuple(PureState(cond[k] / np.sqrt(norms[k])) for k in alive), labels=tuple(e.labels[k] for k in alive))
        br = _responder_branch(resp, gone, alive, 1, True)
        branches.append(br)
        if br.good and br.responder_povm is not None:
            kids.append(Node(responder, tuple(br.responder_povm), tuple(Leaf() for _ in br.responder_povm)))
        else:
            kids.append(Leaf())
    potential = set()
    for br in branches:
        if br.good:
            potential.update(br.reachable)
    if not all(b.good for b in branches):
        unreachable = [s for s in subsets(e.n, 1) if s not in potential]
        return SearchResult(
            False, 1, starter, strong, None, None, None, None, branches, unreachable,
            "a basis outcome leaves the responder a set it cannot antidistinguish; no protocol in structured family",
        )
    root = Node(starter, tuple(ops), tuple(kids))
    return _finish(e, 1, starter, strong, "basis-first", root, branches, None, potential)


# Multipartite scan.


@dataclass
class BipartitionReport:
    block: tuple[int, ...]
    rest: tuple[int, ...]
    decision: LoccDecision
    side_checks: list[ThreeStateVerdict | None]

    def to_dict(self) -> dict:
        def verdict(v):
            if v is None:
                return None
            return {"antidistinguishable": v.antidistinguishable, "x": [float(f"{t:.15g}") for t in v.x]}

        return {
            "block": list(self.block),
            "rest": list(self.rest),
            "locc_antidistinguishable": self.decision.antidistinguishable,
            "decision": self.decision.to_dict(),
            "three_state_checks": [verdict(v) for v in self.side_checks],
        }


@dataclass
class ScanReport:
    global_value: float
    global_status: str
    bipartitions: list[BipartitionReport]

    @property
    def genuine(self) -> bool:
        return self.global_value >= 1 - 1e-6 and all(not b.decision.antidistinguishable for b in self.bipartitions)

    def to_dict(self) -> dict:
        return {
            "global_value": float(f"{self.global_value:.15g}"),
            "global_status": self.global_status,
            "genuine": self.genuine,
            "bipartitions": [b.to_dict() for b in self.bipartitions],
        }


def bipartition_scan(e: Ensemble) -> ScanReport:
    """LOCC antidistinguishability across every bipartition of a product ensemble."""
    _require_product(e, "bipartition_scan")
    if e.n_parties < 3:
        raise StateError(f"bipartition_scan needs at least three parties, got {e.n_parties}")
    glob = exclusion_value(ExclusionTask(e, 1))
    out = []
    for block in bipartitions(e.n_parties):
        g = group_by_bipartition(e, block)
        dec = product_locc_antidist_decision(g)
        checks = [three_state_check_ensemble(marginal_set(g, side)) if e.n == 3 else None for side in (0, 1)]
        rest = tuple(p for p in range(e.n_parties) if p not in block)
        out.append(BipartitionReport(tuple(block), rest, dec, checks))
    return ScanReport(glob.value, glob.status, out)
