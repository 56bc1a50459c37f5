"""Pure states, product states, ensembles and their overlap data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence, Union

import numpy as np

from .linalg import kron, projector

NORM_TOL = 1e-10
AUTONORMALIZE_TOL = 1e-6
PRIOR_TOL = 1e-12


class StateError(ValueError):
    """Invalid state, ensemble, or named-state request."""


def _normalized(amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.size == 0:
        raise StateError("state has no amplitudes")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > AUTONORMALIZE_TOL:
        raise StateError(f"state norm {norm:.9g} is not within {AUTONORMALIZE_TOL:g} of 1")
    return v / norm


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector.

    Inputs within 1e-6 of unit norm are rescaled; anything further off is
    rejected so that transcription errors surface instead of being hidden.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        v = _normalized(self.amplitudes)
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.dim,)

    def projector(self) -> np.ndarray:
        return projector(self.amplitudes)

    def __repr__(self) -> str:
        return f"PureState({np.round(self.amplitudes, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class ProductState:
    parts: tuple[PureState, ...]

    def __post_init__(self):
        parts = tuple(p if isinstance(p, PureState) else PureState(p) for p in self.parts)
        if not parts:
            raise StateError("a product state needs at least one part")
        object.__setattr__(self, "parts", parts)
        flat = kron(*(p.amplitudes for p in parts))
        flat.setflags(write=False)
        object.__setattr__(self, "_flat", flat)

    @property
    def vector(self) -> np.ndarray:
        return self._flat

    @property
    def amplitudes(self) -> np.ndarray:
        return self._flat

    @property
    def dim(self) -> int:
        return self._flat.size

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(p.dim for p in self.parts)

    def projector(self) -> np.ndarray:
        return projector(self._flat)

    def __repr__(self) -> str:
        return "ProductState(" + " ⊗ ".join(repr(p) for p in self.parts) + ")"


AnyState = Union[PureState, ProductState]


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Ordered states with prior weights.

    ``dims`` lists the party dimensions; it defaults to the common factor
    structure of product members, or a single party for flat states.
    """

    states: tuple[AnyState, ...]
    priors: np.ndarray | None = None
    labels: tuple[str, ...] | None = None
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        states = tuple(s if isinstance(s, (PureState, ProductState)) else PureState(s) for s in self.states)
        n = len(states)
        if n < 2:
            raise StateError("an ensemble needs at least two states")
        dim = states[0].dim
        if any(s.dim != dim for s in states):
            raise StateError("all states must have the same global dimension")
        if self.priors is None:
            priors = np.full(n, 1.0 / n)
        else:
            priors = np.asarray(self.priors, dtype=float).reshape(-1)
            if priors.size != n:
                raise StateError(f"{priors.size} priors given for {n} states")
            if np.any(priors < 0) or abs(priors.sum() - 1.0) > PRIOR_TOL:
                raise StateError("priors must be nonnegative and sum to 1")
        priors.setflags(write=False)
        labels = tuple(self.labels) if self.labels is not None else tuple(str(k + 1) for k in range(n))
        if len(labels) != n:
            raise StateError(f"{len(labels)} labels given for {n} states")
        if self.dims is None:
            if all(isinstance(s, ProductState) for s in states) and len({s.dims for s in states}) == 1:
                dims = states[0].dims
            else:
                dims = (dim,)
        else:
            dims = tuple(int(d) for d in self.dims)
            if math.prod(dims) != dim:
                raise StateError(f"party dimensions {dims} do not multiply to {dim}")
            for k, s in enumerate(states):
                if isinstance(s, ProductState) and s.dims != dims:
                    raise StateError(f"state {k + 1} has party dimensions {s.dims}, expected {dims}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dims", dims)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, k: int) -> AnyState:
        return self.states[k]

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def is_product(self) -> bool:
        return all(isinstance(s, ProductState) and s.dims == self.dims for s in self.states)

    def vectors(self) -> list[np.ndarray]:
        return [s.vector for s in self.states]

    def density_matrices(self) -> list[np.ndarray]:
        return [s.projector() for s in self.states]

    def subset(self, indices: Sequence[int], renormalize: bool = True) -> "Ensemble":
        idx = list(indices)
        p = np.array([self.priors[k] for k in idx])
        if renormalize:
            p = p / p.sum()
        return Ensemble(
            tuple(self.states[k] for k in idx), p, tuple(self.labels[k] for k in idx), self.dims
        )


@dataclass(frozen=True)
class GramData:
    overlaps: np.ndarray
    squared: np.ndarray = field(repr=False)

    def pair(self, i: int, j: int) -> float:
        return float(self.squared[i, j])

    def triple_x(self) -> tuple[float, float, float]:
        """``(|<1|2>|^2, |<1|3>|^2, |<2|3>|^2)`` for a three-state ensemble."""
        if self.squared.shape[0] != 3:
            raise StateError("triple_x needs exactly three states")
        s = self.squared
        return float(s[0, 1]), float(s[0, 2]), float(s[1, 2])


def ket(*amplitudes) -> PureState:
    return PureState(np.array(amplitudes, dtype=complex))


def basis(d: int, i: int) -> PureState:
    if not 0 <= i < d:
        raise StateError(f"basis index {i} out of range for dimension {d}")
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return PureState(v)


def _check_eps(eps: float) -> float:
    if not 0.0 < eps < 1.0:
        raise StateError(f"epsilon must lie in (0, 1), got {eps}")
    return float(eps)


def _check_theta(theta: float) -> float:
    if not 0.0 < theta < math.pi / 2:
        raise StateError(f"theta must lie in (0, pi/2), got {theta}")
    return float(theta)


def _bob_amplitudes(eps: float) -> list[np.ndarray]:
    e = _check_eps(eps)
    b = (e - e * e) / math.sqrt(1 - e * e)
    return [
        np.array([1.0, 0.0, 0.0, 0.0]),
        np.array([e, math.sqrt(1 - e * e), 0.0, 0.0]),
        np.array([e, b, math.sqrt((1 - e) * (1 + 2 * e) / (1 + e)), 0.0]),
        np.array(
            [
                e,
                b,
                e * math.sqrt((1 - e) / ((1 + e) * (1 + 2 * e))),
                math.sqrt((1 - e) * (1 + 3 * e) / (1 + 2 * e)),
            ]
        ),
    ]


_S3 = math.sqrt(3.0)
_R2 = 1 / math.sqrt(2.0)

_FIXED = {
    "0": [1.0, 0.0],
    "1": [0.0, 1.0],
    "+": [_R2, _R2],
    "-": [_R2, -_R2],
    "v+": [0.5, _S3 / 2],
    "v-": [0.5, -_S3 / 2],
    "eta1": [math.cos(math.pi / 6), math.sin(math.pi / 6)],
    "eta2": [math.cos(math.pi / 12), math.sin(math.pi / 12)],
}
_ALIASES = {"plus": "+", "minus": "-", "ket0": "0", "ket1": "1", "v_plus": "v+", "v_minus": "v-"}

NAMED_STATES = (
    sorted(_FIXED)
    + ["basis", "plus_theta", "minus_theta"]
    + [f"phi{k}_bob" for k in range(1, 5)]
)


def make_named_state(name: str, *params: float) -> PureState:
    """Build one of the named states used throughout the package.

    Fixed qubit states: ``0``, ``1``, ``+``, ``-``, ``v+``, ``v-``, ``eta1``,
    ``eta2``.  Parametrized: ``basis`` (d, i), ``plus_theta`` / ``minus_theta``
    (theta), ``phi1_bob`` ... ``phi4_bob`` (eps), the four local states whose
    pairwise inner products all equal eps.
    """
    key = _ALIASES.get(name, name)
    if key in _FIXED:
        if params:
            raise StateError(f"state {name!r} takes no parameters")
        return PureState(_FIXED[key])
    if key == "basis":
        if len(params) != 2:
            raise StateError("basis needs (d, i)")
        return basis(int(params[0]), int(params[1]))
    if key in ("plus_theta", "minus_theta"):
        if len(params) != 1:
            raise StateError(f"{name} needs one parameter theta")
        t = _check_theta(params[0])
        sign = 1.0 if key == "plus_theta" else -1.0
        return PureState([math.cos(t), sign * math.sin(t)])
    if key.startswith("phi") and key.endswith("_bob") and key[3:-4] in {"1", "2", "3", "4"}:
        if len(params) != 1:
            raise StateError(f"{name} needs one parameter eps")
        return PureState(_bob_amplitudes(params[0])[int(key[3]) - 1])
    raise StateError(f"unknown named state {name!r}; known: {', '.join(NAMED_STATES)}")


def overlap(a: AnyState, b: AnyState) -> complex:
    """Inner product ``<a|b>``, conjugate-linear in ``a``."""
    if a.dim != b.dim:
        raise StateError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return complex(np.vdot(a.vector, b.vector))


def gram(e: Ensemble) -> GramData:
    v = np.array(e.vectors())
    g = v.conj() @ v.T
    g = (g + g.conj().T) / 2
    np.fill_diagonal(g, 1.0)
    sq = np.clip(np.abs(g) ** 2, 0.0, 1.0)
    return GramData(g, sq)


def marginal_set(e: Ensemble, party: int) -> Ensemble:
    """Local states held by ``party``, in ensemble order with duplicates kept."""
    if not e.is_product:
        raise StateError("marginal_set needs an ensemble of product states")
    if not 0 <= party < e.n_parties:
        raise StateError(f"party {party} out of range for {e.n_parties} parties")
    return Ensemble(tuple(s.parts[party] for s in e.states), e.priors, e.labels)


def retensor(marginals: Sequence[Ensemble], priors=None, labels=None) -> Ensemble:
    """Inverse of taking every party's marginal set."""
    n = len(marginals[0])
    states = tuple(ProductState(tuple(m.states[k] for m in marginals)) for k in range(n))
    return Ensemble(states, priors, labels)


def group_by_bipartition(e: Ensemble, block: Iterable[int]) -> Ensemble:
    """Regroup a product ensemble into (block parties) ⊗ (remaining parties)."""
    if not e.is_product:
        raise StateError("group_by_bipartition needs an ensemble of product states")
    m = e.n_parties
    blk = sorted(set(int(b) for b in block))
    if not blk or len(blk) >= m or blk[0] < 0 or blk[-1] >= m:
        raise StateError(f"block {blk} is not a proper nonempty subset of parties 0..{m - 1}")
    rest = [p for p in range(m) if p not in blk]
    states = []
    for s in e.states:
        a = PureState(kron(*(s.parts[p].vector for p in blk)))
        b = PureState(kron(*(s.parts[p].vector for p in rest)))
        states.append(ProductState((a, b)))
    return Ensemble(tuple(states), e.priors, e.labels)


def bipartitions(n_parties: int) -> list[tuple[int, ...]]:
    """Blocks containing party 0, one per unordered proper bipartition."""
    out = []
    rest = range(1, n_parties)
    for r in range(0, n_parties - 1):
        for extra in combinations(rest, r):
            out.append((0, *extra))
    return out


def bipartite_components(state: AnyState, dims: tuple[int, int]) -> list[np.ndarray]:
    """Unnormalized Bob vectors ``|alpha_i>`` with ``|psi> = sum_i |i>_A |alpha_i>_B``."""
    da, db = dims
    if state.dim != da * db:
        raise StateError(f"state of dimension {state.dim} does not split as {da}x{db}")
    m = state.vector.reshape(da, db)
    return [m[i].copy() for i in range(da)]
