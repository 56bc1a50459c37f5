"""(Strong) x-antidistinguishability of pure-state ensembles via SDP."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from . import linalg, sdp
from .states import Ensemble, PureState, ProductState, StateError, basis

PERFECT_TOL = 1e-6
DEFICIT_TOL = 1e-7
NULL_TRACE = 1e-6

NORMALIZED = "normalized"
UNNORMALIZED = "unnormalized"

Subset = tuple[int, ...]


def subsets(n: int, x: int) -> list[Subset]:
    """Size-``x`` subsets of ``range(n)`` in lexicographic order."""
    return list(combinations(range(n), x))


def subset_label(s: Subset) -> str:
    """1-based display label, e.g. ``(0, 2) -> "1,3"``."""
    return ",".join(str(k + 1) for k in s)


def parse_subset_label(label: str) -> Subset:
    text = label.strip().strip("{}()[]")
    if "," in text:
        parts = [p for p in text.split(",") if p.strip()]
    else:
        parts = list(text)
    try:
        return tuple(sorted(int(p) - 1 for p in parts))
    except ValueError:
        raise ValueError(f"bad outcome label {label!r}") from None


@dataclass(frozen=True)
class ExclusionTask:
    ensemble: Ensemble
    x: int = 1
    strong: bool = False
    normalization: str = NORMALIZED

    def __post_init__(self):
        n = self.ensemble.n
        if not 1 <= self.x <= n - 1:
            raise ValueError(f"x = {self.x} must lie in [1, {n - 1}] for {n} states")
        if self.normalization not in (NORMALIZED, UNNORMALIZED):
            raise ValueError(f"unknown normalization {self.normalization!r}")

    def weights(self) -> np.ndarray:
        if self.normalization == NORMALIZED:
            return np.asarray(self.ensemble.priors, dtype=float)
        return np.ones(self.ensemble.n)


@dataclass
class Povm:
    """Measurement whose outcomes are labelled by the x-subsets they exclude."""

    outcomes: dict[Subset, np.ndarray]

    @property
    def dim(self) -> int:
        return next(iter(self.outcomes.values())).shape[0]

    def labels(self) -> list[Subset]:
        return sorted(self.outcomes)

    def completeness_residual(self) -> float:
        total = sum(self.outcomes.values())
        return float(np.max(np.abs(total - np.eye(self.dim))))

    def min_eigenvalue(self) -> float:
        return min(float(linalg.eigvalsh(linalg.hermitian_part(m))[0]) for m in self.outcomes.values())

    def traces(self) -> dict[Subset, float]:
        return {s: float(np.trace(m).real) for s, m in sorted(self.outcomes.items())}

    def support_traces(self, support: np.ndarray) -> dict[Subset, float]:
        """``Tr(P M_S)`` for the projector ``P`` onto the states' span."""
        return {s: float(np.vdot(support, m).real) for s, m in sorted(self.outcomes.items())}

    def non_null(self, delta: float = NULL_TRACE, support: np.ndarray | None = None) -> list[Subset]:
        tr = self.traces() if support is None else self.support_traces(support)
        return [s for s, t in tr.items() if t > delta]

    def probability(self, label: Subset, state) -> float:
        v = state.vector if hasattr(state, "vector") else np.asarray(state, complex)
        return float(np.vdot(v, self.outcomes[label] @ v).real)


def _cost_matrices(task: ExclusionTask) -> tuple[list[Subset], list[np.ndarray]]:
    e = task.ensemble
    w = task.weights()
    rhos = e.density_matrices()
    labels = subsets(e.n, task.x)
    costs = [sum((w[k] * rhos[k] for k in s), np.zeros((e.dim, e.dim), complex)) for s in labels]
    return labels, costs


def build_exclusion_sdp(task: ExclusionTask) -> sdp.SdpProblem:
    """One block per x-subset ``S`` with cost ``sum_{k in S} w_k rho_k`` and ``sum_S M_S = I``."""
    labels, costs = _cost_matrices(task)
    d = task.ensemble.dim
    return sdp.SdpProblem(
        blocks=[(subset_label(s), d) for s in labels],
        costs=costs,
        completeness=sdp.Completeness(d, {b: None for b in range(len(labels))}),
    )


def error_probabilities(ensemble: Ensemble, povm: Povm) -> np.ndarray:
    """Per state ``k``: probability that an outcome claiming to exclude ``k`` occurs."""
    errs = np.zeros(ensemble.n)
    for s, m in povm.outcomes.items():
        for k in s:
            v = ensemble.states[k].vector
            errs[k] += float(np.vdot(v, m @ v).real)
    return errs


@dataclass
class ExclusionReport:
    value: float
    value_unnormalized: float
    povm: Povm
    errors: np.ndarray
    traces: dict[Subset, float]
    certificate: sdp.DualCertificate
    status: str
    x: int
    strong: bool | None = None
    strong_margin: float | None = None
    deficit: float | None = None

    @property
    def perfect(self) -> bool:
        # Near-perfect values are settled by the feasibility deficit.
        if self.value < 1.0 - PERFECT_TOL:
            return False
        return self.deficit is None or self.deficit <= DEFICIT_TOL

    @property
    def converged(self) -> bool:
        return self.status == sdp.OPTIMAL


def exclusion_value(task: ExclusionTask, gap_tol: float = sdp.GAP_TOL) -> ExclusionReport:
    """Optimal exclusion value ``1 - sum_k prior_k P(error | k)``.

    Both the prior-weighted value and the unweighted sum the appendices use
    are evaluated on the optimal POVM.  With ``task.strong`` the strongness
    check is run as well when the value is perfect.
    """
    problem = build_exclusion_sdp(task)
    sol = sdp.solve(problem, gap_tol=gap_tol)
    cert = sdp.dual_certificate(problem, sol, gap_tol=gap_tol)
    labels = subsets(task.ensemble.n, task.x)
    povm = Povm(dict(zip(labels, sol.blocks)))
    errs = error_probabilities(task.ensemble, povm)
    value = min(1.0, 1.0 - float(np.dot(task.ensemble.priors, errs)))
    value_un = 1.0 - float(errs.sum())
    report = ExclusionReport(
        value=value,
        value_unnormalized=value_un,
        povm=povm,
        errors=errs,
        traces=povm.traces(),
        certificate=cert,
        status=sol.status,
        x=task.x,
    )
    if value >= 1.0 - PERFECT_TOL:
        report.deficit = perfect_exclusion_deficit(task.ensemble, task.x)
    if task.strong:
        if report.perfect:
            res = _strong_from_perfect(task)
            report.strong = res.strong
            report.strong_margin = res.margin
        else:
            report.strong = False
            report.strong_margin = 0.0
    return report


def annihilating_basis(ensemble: Ensemble, s: Subset) -> np.ndarray:
    """Orthonormal basis of the vectors orthogonal to every state in ``s``."""
    return linalg.orthocomplement([ensemble.states[k].vector for k in s], ensemble.dim)


def _perfect_blocks(ensemble: Ensemble, x: int):
    labels = []
    maps = []
    for s in subsets(ensemble.n, x):
        v = annihilating_basis(ensemble, s)
        if v.shape[1]:
            labels.append(s)
            maps.append(v)
    return labels, maps


def perfect_exclusion_deficit(ensemble: Ensemble, x: int) -> float:
    """Least trace of a PSD slack ``Z`` with ``sum_S M_S + Z = I``, each ``M_S``
    confined to the annihilator of ``S``.

    Zero iff a perfect x-exclusion POVM exists.  Near the feasibility boundary
    this shrinks linearly, whereas the exclusion error shrinks quadratically,
    so it separates perfect from imperfect ensembles more sharply than the value.
    """
    _, maps = _perfect_blocks(ensemble, x)
    d = ensemble.dim
    maps = list(maps) + [np.eye(d, dtype=complex)]
    blocks = [(f"M{b}", v.shape[1]) for b, v in enumerate(maps[:-1])] + [("slack", d)]
    costs = [np.zeros((v.shape[1],) * 2, complex) for v in maps[:-1]] + [np.eye(d, dtype=complex)]
    p = sdp.SdpProblem(blocks, costs, completeness=sdp.Completeness(d, dict(enumerate(maps))))
    return max(0.0, sdp.solve(p).primal_value)


@dataclass
class StrongResult:
    strong: bool
    margin: float
    witness: Povm | None
    reason: str = ""
    status: str = ""
    certificate: sdp.DualCertificate | None = None


def support_projector(ensemble: Ensemble) -> np.ndarray:
    """Projector onto the span of the ensemble's states."""
    v = annihilating_basis(ensemble, tuple(range(ensemble.n)))
    return np.eye(ensemble.dim) - v @ v.conj().T


def reduced_povm_problem(
    dim: int,
    maps: Sequence[np.ndarray],
    labels: Sequence[str],
    objective: str,
    target: int | None = None,
    weight: np.ndarray | None = None,
) -> sdp.SdpProblem:
    """POVM problem whose element ``b`` is confined to ``range(maps[b])``.

    ``objective="maxmin"`` maximizes the smallest element weight
    ``Tr(weight M_b)`` through an extra scalar ``t`` and per-element slacks;
    ``objective="target"`` maximizes the weight of element ``target``.  The
    weight defaults to the identity, i.e. plain traces.
    """
    nb = len(maps)
    if weight is None:
        weight = np.eye(dim)
    local_w = [linalg.hermitian_part(v.conj().T @ weight @ v) for v in maps]
    blocks = [(lab, v.shape[1]) for lab, v in zip(labels, maps)]
    costs = [np.zeros((v.shape[1], v.shape[1]), complex) for v in maps]
    constraints = []
    if objective == "maxmin":
        t_idx = nb
        blocks.append(("t", 1))
        costs.append(-np.ones((1, 1), complex))
        for b, v in enumerate(maps):
            blocks.append((f"slack[{labels[b]}]", 1))
            costs.append(np.zeros((1, 1), complex))
            constraints.append(
                sdp.LinearConstraint(
                    {b: local_w[b], t_idx: -np.ones((1, 1)), nb + 1 + b: -np.ones((1, 1))},
                    0.0,
                    f"trace[{labels[b]}] >= t",
                )
            )
    elif objective == "target":
        costs[target] = -local_w[target]
    else:
        raise ValueError(objective)
    comp = sdp.Completeness(dim, {b: v for b, v in enumerate(maps)})
    return sdp.SdpProblem(blocks, costs, constraints, comp)


def _strong_from_perfect(task: ExclusionTask, delta: float = NULL_TRACE) -> StrongResult:
    e = task.ensemble
    labels, maps = _perfect_blocks(e, task.x)
    all_labels = subsets(e.n, task.x)
    missing = [s for s in all_labels if s not in labels]
    if missing:
        return StrongResult(False, 0.0, None, f"outcome {subset_label(missing[0])} must be null", "")
    weight = support_projector(e)
    problem = reduced_povm_problem(e.dim, maps, [subset_label(s) for s in labels], "maxmin", weight=weight)
    try:
        sol = sdp.solve(problem)
    except sdp.StructurallyInfeasibleError:
        return StrongResult(False, 0.0, None, "perfect exclusion constraints are inconsistent", sdp.INFEASIBLE)
    cert = sdp.dual_certificate(problem, sol)
    if sol.status == sdp.INFEASIBLE:
        return StrongResult(False, 0.0, None, "no perfect-exclusion POVM", sol.status, cert)
    outcomes = {s: v @ sol.blocks[b] @ v.conj().T for b, (s, v) in enumerate(zip(labels, maps))}
    witness = Povm(outcomes)
    margin = min(witness.support_traces(weight).values())
    strong = margin >= delta and witness.completeness_residual() <= 1e-7
    reason = "" if strong else f"smallest achievable outcome trace {margin:.3e}"
    return StrongResult(strong, margin, witness, reason, sol.status, cert)


def strong_exclusion_check(task: ExclusionTask, delta: float = NULL_TRACE) -> StrongResult:
    """Is there a perfect x-exclusion POVM with every one of the C(n, x) outcomes non-null?

    Solves ``max t`` subject to ``Tr(rho_k M_S) = 0`` for ``k in S``,
    completeness and ``Tr(P M_S) >= t``, where ``P`` projects onto the span
    of the states (``P = I`` whenever they span the space).  The annihilation constraints are
    imposed exactly by confining ``M_S`` to the orthocomplement of the states
    in ``S``.
    """
    value = exclusion_value(ExclusionTask(task.ensemble, task.x, False, task.normalization))
    if not value.perfect:
        return StrongResult(False, 0.0, None, f"exclusion value {value.value:.9f} < 1", value.status)
    return _strong_from_perfect(task, delta)


@dataclass
class AchievableOutcomes:
    """Outcomes that can be non-null in some perfect x-exclusion POVM."""

    feasible: bool
    achievable: list[Subset]
    max_traces: dict[Subset, float]
    witness: Povm | None
    statuses: list[str] = field(default_factory=list)


def achievable_outcomes(ensemble: Ensemble, x: int, delta: float = NULL_TRACE) -> AchievableOutcomes:
    """Per outcome ``S``, the largest ``Tr(P M_S)`` over perfect x-exclusion POVMs.

    ``P`` projects onto the span of the states, so weight outside the span
    (which no state can ever trigger) does not count.

    The witness is the average of the per-outcome maximizers, so every
    achievable outcome is non-null in it at once.
    """
    labels, maps = _perfect_blocks(ensemble, x)
    if not labels:
        return AchievableOutcomes(False, [], {}, None)
    names = [subset_label(s) for s in labels]
    weight = support_projector(ensemble)
    max_tr = {}
    sols = []
    statuses = []
    for b, s in enumerate(labels):
        problem = reduced_povm_problem(ensemble.dim, maps, names, "target", target=b, weight=weight)
        try:
            sol = sdp.solve(problem)
        except sdp.StructurallyInfeasibleError:
            return AchievableOutcomes(False, [], {}, None, [sdp.INFEASIBLE])
        statuses.append(sol.status)
        if sol.status == sdp.INFEASIBLE:
            return AchievableOutcomes(False, [], {}, None, statuses)
        lifted = [v @ blk @ v.conj().T for v, blk in zip(maps, sol.blocks)]
        total = sum(lifted)
        if np.max(np.abs(total - np.eye(ensemble.dim))) > 1e-6:
            return AchievableOutcomes(False, [], {}, None, statuses)
        max_tr[s] = float(np.vdot(weight, lifted[b]).real)
        if max_tr[s] > delta:
            sols.append(lifted)
    achievable = [s for s in labels if max_tr[s] > delta]
    if not sols:
        return AchievableOutcomes(True, [], max_tr, None, statuses)
    avg = [sum(sol[b] for sol in sols) / len(sols) for b in range(len(labels))]
    witness = Povm({s: linalg.hermitian_part(m) for s, m in zip(labels, avg)})
    return AchievableOutcomes(True, achievable, max_tr, witness, statuses)


def theorem5_family(d: int, r: Sequence[float] | None = None, zeta: Sequence | None = None) -> Ensemble:
    """Three ``d x d`` product states ``|00>, |0 w>, |w w>`` with ``w = |0>/2 + sum_i r_i |zeta_i>``.

    ``r`` defaults to ``(sqrt(3)/2, 0, ...)`` and ``zeta`` to ``|1>, ..., |d-1>``.
    """
    if d < 2:
        raise StateError("theorem5_family needs d >= 2")
    if r is None:
        r = [math.sqrt(3) / 2] + [0.0] * (d - 2)
    r = np.asarray(r, dtype=complex).reshape(-1)
    if r.size != d - 1:
        raise StateError(f"need {d - 1} coefficients r_i, got {r.size}")
    if abs(0.25 + float(np.sum(np.abs(r) ** 2)) - 1.0) > 1e-9:
        raise StateError("(1/2, r) must have unit norm")
    if zeta is None:
        zeta = [basis(d, i).vector for i in range(1, d)]
    z = np.array([np.asarray(getattr(v, "vector", v), complex).reshape(-1) for v in zeta])
    if z.shape != (d - 1, d):
        raise StateError(f"need {d - 1} vectors zeta_i of dimension {d}")
    full = np.vstack([basis(d, 0).vector, z])
    if np.max(np.abs(full.conj() @ full.T - np.eye(d))) > 1e-9:
        raise StateError("zeta_i must be orthonormal and orthogonal to |0>")
    w = PureState(0.5 * full[0] + r @ z)
    zero = basis(d, 0)
    states = (ProductState((zero, zero)), ProductState((zero, w)), ProductState((w, w)))
    return Ensemble(states)


@dataclass
class ThresholdResult:
    threshold: float
    lo: float
    hi: float
    evaluations: list[tuple[float, float]]


def locate_threshold(
    family: Callable[[float], Ensemble],
    lo: float,
    hi: float,
    x: int,
    tol: float = 1e-3,
    perfect_tol: float = PERFECT_TOL,
) -> ThresholdResult:
    """Bisect for the parameter where the x-exclusion value stops being perfect.

    ``family(lo)`` must be perfectly x-excludable and ``family(hi)`` not.
    """
    evals = []

    def perfect(t: float) -> bool:
        rep = exclusion_value(ExclusionTask(family(t), x))
        evals.append((t, rep.value))
        return rep.perfect and rep.value >= 1.0 - perfect_tol

    if not perfect(lo):
        raise ValueError(f"family is not perfectly {x}-excludable at lo = {lo}")
    if perfect(hi):
        raise ValueError(f"family is still perfectly {x}-excludable at hi = {hi}")
    a, b = lo, hi
    while b - a > tol:
        mid = (a + b) / 2
        if perfect(mid):
            a = mid
        else:
            b = mid
    return ThresholdResult((a + b) / 2, a, b, evals)


@dataclass
class PovmCheck:
    feasibility: sdp.FeasibilityReport
    value: float
    repaired_value: float | None
    valid: bool
    annihilation: dict[Subset, float]

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "value": self.value,
            "repaired_value": self.repaired_value,
            "annihilation": {subset_label(s): v for s, v in self.annihilation.items()},
            "feasibility": self.feasibility.to_dict(),
        }


def check_povm(task: ExclusionTask, povm: Povm, tol: float) -> PovmCheck:
    """Evaluate a given measurement on an exclusion task.

    Outcomes absent from ``povm`` count as zero.  ``value`` is the exclusion
    value the measurement achieves as given; ``repaired_value`` is the value
    after repairing it into an exact POVM.  ``annihilation`` lists, per
    outcome, the largest probability of a state it claims to exclude.
    """
    labels = subsets(task.ensemble.n, task.x)
    extra = [s for s in povm.outcomes if s not in labels]
    if extra:
        raise ValueError(f"outcome {subset_label(extra[0])} is not a {task.x}-subset of {task.ensemble.n} states")
    d = task.ensemble.dim
    if povm.dim != d:
        raise ValueError(f"POVM acts on dimension {povm.dim}, ensemble has dimension {d}")
    zero = np.zeros((d, d), complex)
    cand = [povm.outcomes.get(s, zero) for s in labels]
    problem = build_exclusion_sdp(task)
    rep = sdp.verify_feasible_point(problem, cand, tol)

    def value_of(obj: float) -> float:
        return 1.0 - obj

    ann = {
        s: max(povm.probability(s, task.ensemble.states[k]) for k in s) for s in labels if s in povm.outcomes
    }
    repaired = None if rep.repaired_objective is None else value_of(rep.repaired_objective)
    return PovmCheck(rep, value_of(rep.objective), repaired, rep.valid, ann)
