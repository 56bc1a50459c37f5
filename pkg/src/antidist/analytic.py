"""Closed-form antidistinguishability tests.

These run independently of the SDP solver and act as oracles for it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .states import Ensemble, gram

BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class ThreeStateVerdict:
    condition_a: bool
    condition_b: bool
    antidistinguishable: bool
    boundary: bool
    margin: float  # (sum - 1)^2 - 4 x1 x2 x3
    x: tuple[float, float, float]


def three_state_check(x1: float, x2: float, x3: float, tol: float = BOUNDARY_TOL) -> ThreeStateVerdict:
    """Antidistinguishability of three pure states from their squared overlaps.

    ``x1 = |<1|2>|^2``, ``x2 = |<1|3>|^2``, ``x3 = |<2|3>|^2``.  The sum test is
    strict with no tolerance; the product test accepts a deficit of up to
    ``tol`` and flags it as a boundary case.
    """
    xs = (float(x1), float(x2), float(x3))
    for k, v in enumerate(xs, start=1):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"x{k} = {v} lies outside [0, 1]")
    s = sum(xs)
    margin = (s - 1.0) ** 2 - 4.0 * xs[0] * xs[1] * xs[2]
    cond_a = s < 1.0
    cond_b = margin >= -tol
    return ThreeStateVerdict(cond_a, cond_b, cond_a and cond_b, abs(margin) <= tol, margin, xs)


def three_state_check_ensemble(e: Ensemble, tol: float = BOUNDARY_TOL) -> ThreeStateVerdict:
    if e.n != 3:
        raise ValueError(f"three_state_check needs three states, got {e.n}")
    return three_state_check(*gram(e).triple_x(), tol=tol)


def equal_overlap_triple(eps: float) -> bool:
    """Three states with all pairwise inner products equal to ``eps``."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps = {eps} lies outside [0, 1]")
    return eps <= 0.5


def orthogonal_pair_exists(e: Ensemble, tol: float = 1e-12) -> tuple[int, int] | None:
    """First (lexicographic, 0-based) pair of mutually orthogonal members."""
    g = gram(e).overlaps
    for i in range(e.n):
        for j in range(i + 1, e.n):
            if abs(g[i, j]) <= tol:
                return i, j
    return None
