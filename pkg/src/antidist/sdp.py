"""Small block-structured semidefinite programs.

Problems are stated over complex Hermitian PSD blocks ``X_b``::

    minimize    sum_b Tr(C_b X_b)
    subject to  sum_b Tr(A_cb X_b) = r_c        for each explicit constraint c
                sum_b V_b X_b V_b^H = I          (optional completeness family)
                X_b >= 0

and solved by an infeasible-start primal-dual path-following method
(Mehrotra predictor-corrector, HKM search direction) on the real symmetric
embedding of every block.  The dual is::

    maximize    sum_c r_c y_c
    subject to  C_b - sum_c y_c A_cb >= 0
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from . import linalg
from .linalg import PSD_FLOOR, check_hermitian, hermitian_basis, real_embedding, real_embedding_inverse

GAP_TOL = 1e-8
FEAS_TOL = 1e-9
MAX_ITER = 500
MAX_ITER_ENV = "ANTIDIST_MAX_ITER"

OPTIMAL = "optimal"
MAX_ITERATIONS = "max-iterations"
INFEASIBLE = "infeasible"


class SdpError(Exception):
    pass


class StructurallyInfeasibleError(SdpError):
    """The equality constraints admit no Hermitian solution at all."""


def max_iterations() -> int:
    raw = os.environ.get(MAX_ITER_ENV)
    if raw is None:
        return MAX_ITER
    try:
        value = int(raw)
    except ValueError:
        raise SdpError(f"{MAX_ITER_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise SdpError(f"{MAX_ITER_ENV} must be positive, got {value}")
    return value


@dataclass
class LinearConstraint:
    coeffs: dict[int, np.ndarray]
    rhs: float
    label: str = ""


@dataclass
class Completeness:
    """``sum_b V_b X_b V_b^H = I_dim`` over the listed blocks.

    A map of ``None`` means the block lives on the full space (``V_b = I``).
    """

    dim: int
    maps: dict[int, np.ndarray | None]

    def lift(self, b: int, x: np.ndarray) -> np.ndarray:
        v = self.maps[b]
        return x if v is None else v @ x @ v.conj().T

    def residual(self, blocks: Sequence[np.ndarray]) -> float:
        total = sum((self.lift(b, blocks[b]) for b in self.maps), np.zeros((self.dim, self.dim), complex))
        return float(np.max(np.abs(total - np.eye(self.dim))))


@dataclass
class SdpProblem:
    blocks: list[tuple[str, int]]
    costs: list[np.ndarray]
    constraints: list[LinearConstraint] = field(default_factory=list)
    completeness: Completeness | None = None

    def __post_init__(self):
        if len(self.costs) != len(self.blocks):
            raise SdpError("one cost matrix is needed per block")
        costs = []
        for (label, dim), c in zip(self.blocks, self.costs):
            c = check_hermitian(c)
            if c.shape != (dim, dim):
                raise SdpError(f"cost of block {label!r} has shape {c.shape}, expected {(dim, dim)}")
            costs.append(c)
        self.costs = costs
        for con in self.constraints:
            for b, a in con.coeffs.items():
                a = check_hermitian(a)
                if a.shape != (self.blocks[b][1],) * 2:
                    raise SdpError(f"constraint {con.label!r} has a mis-shaped block {b}")
                con.coeffs[b] = a
        if self.completeness is not None:
            for b, v in self.completeness.maps.items():
                dim = self.blocks[b][1]
                if v is not None and v.shape != (self.completeness.dim, dim):
                    raise SdpError(f"completeness map of block {b} has shape {v.shape}")
                if v is None and dim != self.completeness.dim:
                    raise SdpError(f"block {b} needs a map to the completeness space")

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def labels(self) -> list[str]:
        return [label for label, _ in self.blocks]

    def expanded_constraints(self) -> list[LinearConstraint]:
        """Explicit constraints followed by the completeness family in a Hermitian basis."""
        out = list(self.constraints)
        if self.completeness is not None:
            comp = self.completeness
            for k, e in enumerate(hermitian_basis(comp.dim)):
                coeffs = {}
                for b, v in comp.maps.items():
                    coeffs[b] = e if v is None else v.conj().T @ e @ v
                out.append(LinearConstraint(coeffs, float(np.trace(e).real), f"completeness[{k}]"))
        return out

    def objective(self, blocks: Sequence[np.ndarray]) -> float:
        return float(sum(np.vdot(c, x).real for c, x in zip(self.costs, blocks)))

    def constraint_residual(self, blocks: Sequence[np.ndarray]) -> float:
        worst = 0.0
        for con in self.constraints:
            val = sum(np.vdot(a, blocks[b]).real for b, a in con.coeffs.items())
            worst = max(worst, abs(val - con.rhs))
        return worst

    def dual_slacks(self, y: np.ndarray) -> list[np.ndarray]:
        cons = self.expanded_constraints()
        slacks = [c.copy() for c in self.costs]
        for yc, con in zip(y, cons):
            for b, a in con.coeffs.items():
                slacks[b] = slacks[b] - yc * a
        return [linalg.hermitian_part(s) for s in slacks]

    def dual_objective(self, y: np.ndarray) -> float:
        return float(sum(yc * con.rhs for yc, con in zip(y, self.expanded_constraints())))


@dataclass
class SdpSolution:
    blocks: list[np.ndarray]
    y: np.ndarray
    slacks: list[np.ndarray]
    primal_value: float
    dual_value: float
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float

    @property
    def gap(self) -> float:
        return self.primal_value - self.dual_value

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _RealData:
    """Real embedding of a problem with the per-block constraint stacks."""

    def __init__(self, p: SdpProblem):
        cons = p.expanded_constraints()
        self.m_full = len(cons)
        self.sizes = [2 * d for _, d in p.blocks]
        self.c = [real_embedding(c) for c in p.costs]
        b_full = np.array([2.0 * con.rhs for con in cons])
        a_full = []
        for bi, n in enumerate(self.sizes):
            stack = np.zeros((self.m_full, n, n))
            for ci, con in enumerate(cons):
                a = con.coeffs.get(bi)
                if a is not None:
                    stack[ci] = real_embedding(a)
            a_full.append(stack)
        self.keep = self._independent_rows(a_full, b_full)
        self.m = len(self.keep)
        self.b = b_full[self.keep]
        self.active = []
        self.a = []
        for stack in a_full:
            sub = stack[self.keep]
            act = np.flatnonzero(np.abs(sub).reshape(self.m, -1).max(axis=1) > 0)
            self.active.append(act)
            self.a.append(sub[act])

    def _independent_rows(self, a_full, b_full) -> np.ndarray:
        if self.m_full == 0:
            return np.zeros(0, dtype=int)
        mat = np.hstack([s.reshape(self.m_full, -1) for s in a_full])
        _, r, piv = scipy.linalg.qr(mat.T, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r))
        rank = int(np.sum(diag > 1e-10 * max(1.0, diag[0]))) if diag.size else 0
        keep = np.sort(piv[:rank])
        dropped = np.setdiff1d(np.arange(self.m_full), keep)
        if dropped.size:
            coef, *_ = np.linalg.lstsq(mat[keep].T, mat[dropped].T, rcond=None)
            implied = coef.T @ b_full[keep]
            if np.max(np.abs(implied - b_full[dropped])) > 1e-9 * (1 + np.max(np.abs(b_full))):
                raise StructurallyInfeasibleError("equality constraints are inconsistent")
        return keep

    def op(self, xs) -> np.ndarray:
        out = np.zeros(self.m)
        for act, a, x in zip(self.active, self.a, xs):
            if act.size:
                out[act] += a.reshape(act.size, -1) @ x.reshape(-1)
        return out

    def adj(self, y) -> list[np.ndarray]:
        out = []
        for act, a, n in zip(self.active, self.a, self.sizes):
            if act.size:
                out.append(np.tensordot(y[act], a, axes=1))
            else:
                out.append(np.zeros((n, n)))
        return out

    def schur(self, xs, zis) -> np.ndarray:
        m = np.zeros((self.m, self.m))
        for act, a, x, zi in zip(self.active, self.a, xs, zis):
            if not act.size:
                continue
            g = np.matmul(np.matmul(x, a), zi)
            k = act.size
            m[np.ix_(act, act)] += a.reshape(k, -1) @ g.reshape(k, -1).T
        return (m + m.T) / 2


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2


def _inner(xs, zs) -> float:
    return float(sum(np.vdot(x, z) for x, z in zip(xs, zs)))


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    try:
        l = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        return 0.0
    li = scipy.linalg.solve_triangular(l, np.eye(x.shape[0]), lower=True)
    s = _sym(li @ dx @ li.T)
    lam = float(np.linalg.eigvalsh(s)[0])
    return math.inf if lam >= 0 else -1.0 / lam


def _step(xs, dxs, tau: float) -> float:
    alpha = min([1.0] + [tau * _max_step(x, dx) for x, dx in zip(xs, dxs)])
    # backtrack until every block keeps a Cholesky factor
    for _ in range(60):
        try:
            for x, dx in zip(xs, dxs):
                np.linalg.cholesky(x + alpha * dx)
            return alpha
        except np.linalg.LinAlgError:
            alpha *= 0.8
    return 0.0


def solve(
    p: SdpProblem,
    gap_tol: float = GAP_TOL,
    feas_tol: float = FEAS_TOL,
    max_iter: int | None = None,
) -> SdpSolution:
    """Solve ``p`` to a duality gap of ``gap_tol``.

    The starting point is ``X_b = I / n_blocks``, ``Z_b`` a multiple of the
    identity and ``y = 0``.  If the iteration limit is reached the best iterate
    seen is returned with status ``max-iterations`` and its actual gap and
    residuals.

    Raises
    ------
    StructurallyInfeasibleError
        If the equality constraints are inconsistent as a linear system.
    """
    if max_iter is None:
        max_iter = max_iterations()
    data = _RealData(p)
    nb = p.n_blocks
    total_dim = sum(data.sizes)
    cnorm = max(float(np.linalg.norm(c)) for c in data.c)
    bnorm = float(np.linalg.norm(data.b)) if data.m else 0.0
    xs = [np.eye(n) / nb for n in data.sizes]
    zs = [np.eye(n) * (1.0 + cnorm) for n in data.sizes]
    y = np.zeros(data.m)

    best = None
    best_merit = math.inf
    status = MAX_ITERATIONS
    stall = 0
    it = 0
    for it in range(1, max_iter + 1):
        aty = data.adj(y)
        rp = data.b - data.op(xs)
        rd = [c - z - a for c, z, a in zip(data.c, zs, aty)]
        pobj = _inner(data.c, xs) / 2
        dobj = float(data.b @ y) / 2
        comp = _inner(xs, zs)
        mu = comp / total_dim
        relp = float(np.linalg.norm(rp)) / (1.0 + bnorm)
        reld = max(float(np.linalg.norm(r)) for r in rd) / (1.0 + cnorm)
        gap = abs(pobj - dobj)
        merit = max(relp / feas_tol, reld / feas_tol, gap / gap_tol, comp / 2 / gap_tol)
        if merit < best_merit:
            best_merit = merit
            best = ([x.copy() for x in xs], y.copy(), [z.copy() for z in zs], relp, reld)
        if merit <= 1.0:
            status = OPTIMAL
            break
        if (dobj > 1e9 * (1 + abs(pobj)) and reld < 1e-6) or (pobj < -1e9 and relp < 1e-6):
            status = INFEASIBLE
            break
        if max(float(np.max(np.abs(x))) for x in xs) > 1e12 or float(np.max(np.abs(y), initial=0.0)) > 1e12:
            status = INFEASIBLE
            break

        zis = []
        for z in zs:
            l = np.linalg.cholesky(z)
            li = scipy.linalg.solve_triangular(l, np.eye(z.shape[0]), lower=True)
            zis.append(li.T @ li)
        schur = data.schur(xs, zis)
        try:
            factor = scipy.linalg.cho_factor(schur)
        except np.linalg.LinAlgError:
            reg = 1e-14 * max(1.0, float(np.trace(schur)) / max(1, data.m))
            factor = scipy.linalg.cho_factor(schur + reg * np.eye(data.m))

        def direction(rc_zi):
            # rc_zi[b] = Rc_b Z_b^{-1}; solves the linearized system for (dX, dy, dZ)
            h = [r - x @ d @ zi for r, x, d, zi in zip(rc_zi, xs, rd, zis)]
            rhs = rp - data.op(h)
            dy = scipy.linalg.cho_solve(factor, rhs) if data.m else np.zeros(0)
            atdy = data.adj(dy)
            dz = [d - a for d, a in zip(rd, atdy)]
            dx = [_sym(r - x @ d @ zi) for r, x, d, zi in zip(rc_zi, xs, dz, zis)]
            return dx, dy, dz

        dx_a, dy_a, dz_a = direction([-x for x in xs])
        ap = _step(xs, dx_a, 1.0)
        ad = _step(zs, dz_a, 1.0)
        mu_aff = _inner([x + ap * d for x, d in zip(xs, dx_a)], [z + ad * d for z, d in zip(zs, dz_a)]) / total_dim
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        rc_zi = [
            sigma * mu * zi - x - dxa @ dza @ zi for zi, x, dxa, dza in zip(zis, xs, dx_a, dz_a)
        ]
        dx, dy, dz = direction(rc_zi)
        tau = 0.98
        ap = _step(xs, dx, tau)
        ad = _step(zs, dz, tau)
        if ap < 1e-12 and ad < 1e-12:
            stall += 1
            if stall >= 5:
                break
        else:
            stall = 0
        xs = [x + ap * d for x, d in zip(xs, dx)]
        y = y + ad * dy
        zs = [z + ad * d for z, d in zip(zs, dz)]

    if status != OPTIMAL and best is not None:
        xs, y, zs, relp, reld = best
    else:
        aty = data.adj(y)
        rp = data.b - data.op(xs)
        relp = float(np.linalg.norm(rp)) / (1.0 + bnorm)
        reld = max(float(np.linalg.norm(c - z - a)) for c, z, a in zip(data.c, zs, aty)) / (1.0 + cnorm)

    y_full = np.zeros(data.m_full)
    y_full[data.keep] = y
    blocks = [real_embedding_inverse(x) for x in xs]
    slacks = [real_embedding_inverse(z) for z in zs]
    return SdpSolution(
        blocks=blocks,
        y=y_full,
        slacks=slacks,
        primal_value=p.objective(blocks),
        dual_value=p.dual_objective(y_full),
        status=status,
        iterations=it,
        primal_residual=relp,
        dual_residual=reld,
    )


@dataclass
class DualCertificate:
    primal_value: float
    dual_value: float
    gap: float
    primal_residual: float
    slack_min_eigenvalues: list[float]
    dual_infeasibility: float
    weak_duality: bool
    certified: bool
    lower_bound: float | None = None
    dual_operator: np.ndarray | None = None
    reasons: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "gap": self.gap,
            "primal_residual": self.primal_residual,
            "slack_min_eigenvalues": list(self.slack_min_eigenvalues),
            "dual_infeasibility": self.dual_infeasibility,
            "weak_duality": self.weak_duality,
            "certified": self.certified,
            "lower_bound": self.lower_bound,
            "reasons": list(self.reasons),
        }


def dual_certificate(
    p: SdpProblem,
    s: SdpSolution,
    gap_tol: float = GAP_TOL,
    feas_tol: float = 1e-8,
    floor: float = PSD_FLOOR,
) -> DualCertificate:
    """Check a solution's dual multipliers independently of the solver.

    The dual slacks ``C_b - A_b^*(y)`` are recomputed from ``y`` and tested
    with the Jacobi eigensolver.  For pure completeness problems the dual
    operator ``Y = sum_c y_c E_c`` is also returned and shifting it by the
    most negative slack eigenvalue yields a rigorous lower bound on the
    optimum.
    """
    reasons = []
    slacks = p.dual_slacks(s.y)
    mins = [float(linalg.eigvalsh(z)[0]) if z.size else 0.0 for z in slacks]
    worst = min(mins) if mins else 0.0
    dual_inf = max(0.0, -worst)
    dval = p.dual_objective(s.y)
    pval = p.objective(s.blocks)
    resid = p.constraint_residual(s.blocks)
    if p.completeness is not None:
        resid = max(resid, p.completeness.residual(s.blocks))
    weak = dval <= pval + gap_tol
    lower = None
    y_op = None
    comp = p.completeness
    if comp is not None and not p.constraints:
        basis = hermitian_basis(comp.dim)
        y_op = sum((yc * e for yc, e in zip(s.y, basis)), np.zeros((comp.dim, comp.dim), complex))
        isometric = all(
            v is None or np.allclose(v.conj().T @ v, np.eye(v.shape[1]), atol=1e-10) for v in comp.maps.values()
        )
        if isometric:
            lower = dval + comp.dim * min(0.0, worst)
    if s.status != OPTIMAL:
        reasons.append(f"solver status {s.status}")
    if worst < floor:
        reasons.append(f"dual slack has eigenvalue {worst:.3e} below floor {floor:.1e}")
    if not weak:
        reasons.append(f"dual value {dval:.12g} exceeds primal {pval:.12g}")
    if abs(pval - dval) > gap_tol:
        reasons.append(f"duality gap {pval - dval:.3e} exceeds {gap_tol:.1e}")
    if resid > feas_tol:
        reasons.append(f"primal residual {resid:.3e} exceeds {feas_tol:.1e}")
    block_mins = [float(linalg.eigvalsh(x)[0]) for x in s.blocks]
    if block_mins and min(block_mins) < floor:
        reasons.append(f"primal block eigenvalue {min(block_mins):.3e} below floor")
    return DualCertificate(
        primal_value=pval,
        dual_value=dval,
        gap=pval - dval,
        primal_residual=resid,
        slack_min_eigenvalues=mins,
        dual_infeasibility=dual_inf,
        weak_duality=weak,
        certified=not reasons,
        lower_bound=lower,
        dual_operator=y_op,
        reasons=reasons,
    )


@dataclass
class FeasibilityReport:
    min_eigenvalues: list[float]
    completeness_residual: float
    constraint_residual: float
    objective: float
    valid: bool
    repaired_objective: float | None = None

    def to_dict(self) -> dict:
        return {
            "min_eigenvalues": list(self.min_eigenvalues),
            "completeness_residual": self.completeness_residual,
            "constraint_residual": self.constraint_residual,
            "objective": self.objective,
            "valid": self.valid,
            "repaired_objective": self.repaired_objective,
        }


def repair_povm(blocks: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Nearest-style repair of a rounded POVM.

    Negative eigenvalues are clipped and the elements are conjugated by
    ``S^{-1/2}`` with ``S`` their sum, so the result is an exact POVM.
    """
    clipped = []
    for b in blocks:
        dec = linalg.eig_hermitian(linalg.hermitian_part(b), tol=1e-6)
        w = np.clip(dec.eigenvalues, 0.0, None)
        clipped.append((dec.eigenvectors * w) @ dec.eigenvectors.conj().T)
    total = sum(clipped)
    t = linalg.inv_sqrtm_pd(total)
    return [linalg.hermitian_part(t @ c @ t) for c in clipped]


def verify_feasible_point(p: SdpProblem, candidate: Sequence, tol: float) -> FeasibilityReport:
    """Evaluate a candidate primal point: PSD margins, residuals, objective.

    When the problem is a plain POVM problem (completeness over full-space
    blocks, no other constraints) the candidate is also repaired into an exact
    POVM and its objective reported as ``repaired_objective``.
    """
    if len(candidate) != p.n_blocks:
        raise SdpError(f"{len(candidate)} candidate blocks for {p.n_blocks} problem blocks")
    blocks = []
    for (label, dim), c in zip(p.blocks, candidate):
        m = linalg.as_matrix(c)
        if m.shape != (dim, dim):
            raise SdpError(f"candidate block {label!r} has shape {m.shape}, expected {(dim, dim)}")
        blocks.append(linalg.check_hermitian(m, tol=max(tol, linalg.HERMITIAN_TOL)))
    mins = [float(linalg.eigvalsh(linalg.hermitian_part(b))[0]) for b in blocks]
    comp_res = p.completeness.residual(blocks) if p.completeness is not None else 0.0
    con_res = p.constraint_residual(blocks)
    obj = p.objective(blocks)
    valid = min(mins) >= -tol and comp_res <= tol and con_res <= tol
    repaired = None
    comp = p.completeness
    if (
        comp is not None
        and not p.constraints
        and set(comp.maps) == set(range(p.n_blocks))
        and all(v is None for v in comp.maps.values())
    ):
        try:
            repaired = p.objective(repair_povm(blocks))
        except np.linalg.LinAlgError:
            repaired = None
    return FeasibilityReport(mins, comp_res, con_res, obj, valid, repaired)
