"""Sign functions, the oracle and the signed evolution operator.

One step of the walk is ``U = S (2 d_s^* d_s - I)`` where ``d_s`` is the
boundary matrix with column ``a`` multiplied by ``sign(a)``.  ``U`` is real,
but states are kept complex so they mix freely with the lifted eigenvectors
from :mod:`arcwalk.spectral`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .exceptions import ResourceLimitError, ShapeError, SignConstraintError
from .graph import Arc, Graph, boundary_matrix, dense_cap, shift_matrix

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SignFunction:
    """A +-1 label per arc; an arc and its inverse may not both be -1."""

    graph: Graph
    signs: np.ndarray = field(repr=False)

    def __post_init__(self):
        signs = np.array(self.signs, dtype=np.int8).reshape(-1)
        if signs.shape != (self.graph.n_arcs,):
            raise ShapeError(f"expected {self.graph.n_arcs} signs, got {signs.size}")
        if not np.all(np.abs(signs) == 1):
            raise SignConstraintError("signs must be +1 or -1")
        both = (signs == -1) & (signs[self.graph.inverse_index] == -1)
        if both.any():
            bad = [str(self.graph.arc(i)) for i in np.flatnonzero(both)[::2]]
            raise SignConstraintError(f"arc and inverse both marked: {', '.join(bad)}")
        signs.flags.writeable = False
        object.__setattr__(self, "signs", signs)

    @classmethod
    def all_positive(cls, graph: Graph) -> "SignFunction":
        return cls(graph, np.ones(graph.n_arcs, dtype=np.int8))

    @property
    def marked(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.signs == -1))

    @property
    def marked_arcs(self) -> tuple[Arc, ...]:
        return tuple(self.graph.arc(i) for i in self.marked)

    def __call__(self, arc) -> int:
        return int(self.signs[self.graph.arc_index(arc)])

    def __repr__(self) -> str:
        marks = ", ".join(str(a) for a in self.marked_arcs) or "none"
        return f"SignFunction({self.graph!r}, marked={marks})"


def single_arc_sign(graph: Graph, arc) -> SignFunction:
    """The sign function marking exactly ``arc``."""
    signs = np.ones(graph.n_arcs, dtype=np.int8)
    signs[graph.arc_index(arc)] = -1
    return SignFunction(graph, signs)


def marked_sign(graph: Graph, arcs: Iterable) -> SignFunction:
    signs = np.ones(graph.n_arcs, dtype=np.int8)
    for arc in arcs:
        signs[graph.arc_index(arc)] = -1
    return SignFunction(graph, signs)


def oracle_matrix(sign: SignFunction) -> np.ndarray:
    return np.diag(sign.signs.astype(float))


def signed_boundary(graph: Graph, sign: SignFunction) -> np.ndarray:
    d = np.zeros((graph.n_vertices, graph.n_arcs))
    cols = np.arange(graph.n_arcs)
    d[graph.termini, cols] = sign.signs / np.sqrt(graph.degree[graph.termini])
    return d


def evolution_entry(graph: Graph, sign: SignFunction, a, b) -> float:
    """Entry ``(a, b)`` of the evolution operator, straight from its closed form."""
    i, j = graph.arc_index(a), graph.arc_index(b)
    arc_a, arc_b = graph.arcs[i], graph.arcs[j]
    value = 0.0
    if arc_a.origin == arc_b.terminus:
        inv_a = graph.inverse_index[i]
        value += 2.0 * int(sign.signs[inv_a]) * int(sign.signs[j]) / graph.degree[arc_b.terminus]
    if i == graph.inverse_index[j]:
        value -= 1.0
    return value


def entrywise_matrix(graph: Graph, sign: SignFunction) -> np.ndarray:
    """The full operator assembled entry by entry from the closed form."""
    o, t = graph.origins, graph.termini
    inv = graph.inverse_index
    s = sign.signs.astype(float)
    adjacent = o[:, None] == t[None, :]
    coeff = 2.0 * s[inv][:, None] * s[None, :] / graph.degree[t][None, :]
    out = np.where(adjacent, coeff, 0.0)
    out[np.arange(graph.n_arcs), inv] -= 1.0
    return out


class WalkOperator:
    """The signed evolution operator for one ``(graph, sign)`` pair.

    The dense matrix is materialised only when the arc count is at most the
    dense cap; otherwise :meth:`apply` runs matrix-free in
    ``O(|arcs|)`` per step.
    """

    def __init__(self, graph: Graph, sign: SignFunction, cap: int | None = None):
        if sign.graph is not graph and sign.graph != graph:
            raise ShapeError("sign function belongs to a different graph")
        self.graph = graph
        self.sign = sign
        self.dense_cap = dense_cap(cap)
        self._t = graph.termini
        self._inv = graph.inverse_index
        self._s = sign.signs.astype(float)
        self._inv_deg = 1.0 / graph.degree.astype(float)
        self._dense = self._build_dense() if graph.n_arcs <= self.dense_cap else None

    @property
    def n_arcs(self) -> int:
        return self.graph.n_arcs

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    @property
    def signed_boundary(self) -> np.ndarray:
        return signed_boundary(self.graph, self.sign)

    @property
    def oracle(self) -> np.ndarray:
        return oracle_matrix(self.sign)

    def _build_dense(self) -> np.ndarray:
        ds = signed_boundary(self.graph, self.sign)
        s = shift_matrix(self.graph)
        m = s @ (2.0 * ds.T @ ds - np.eye(self.n_arcs))
        m.flags.writeable = False
        return m

    def matrix(self, force: bool = False) -> np.ndarray:
        """Dense matrix; above the cap only with ``force=True``."""
        if self._dense is not None:
            return self._dense
        if not force:
            raise ResourceLimitError(
                f"{self.n_arcs} arcs exceeds the dense cap {self.dense_cap}; pass force=True to build anyway"
            )
        return self._build_dense()

    def apply_matrix_free(self, psi: np.ndarray) -> np.ndarray:
        w = self._s * psi
        n = self.graph.n_vertices
        vert = np.bincount(self._t, weights=w.real, minlength=n).astype(complex)
        if np.iscomplexobj(w):
            vert += 1j * np.bincount(self._t, weights=w.imag, minlength=n)
        vert *= self._inv_deg
        reflected = 2.0 * self._s * vert[self._t] - psi
        return reflected[self._inv]

    def apply(self, psi: np.ndarray) -> np.ndarray:
        psi = np.asarray(psi)
        if psi.shape != (self.n_arcs,):
            raise ShapeError(f"state has shape {psi.shape}, expected ({self.n_arcs},)")
        if self._dense is not None:
            return self._dense @ psi
        return self.apply_matrix_free(psi)

    def __matmul__(self, psi):
        return self.apply(psi)

    def __repr__(self) -> str:
        mode = "dense" if self.is_dense else "matrix-free"
        return f"WalkOperator({self.sign!r}, {mode})"


def evolution_operator(graph: Graph, sign: SignFunction, cap: int | None = None) -> WalkOperator:
    return WalkOperator(graph, sign, cap=cap)


def uniform_state(graph: Graph) -> np.ndarray:
    return np.full(graph.n_arcs, 1.0 / np.sqrt(graph.n_arcs), dtype=complex)


def evolve(op: WalkOperator, state: np.ndarray, steps: int) -> np.ndarray:
    """``U^steps @ state`` by repeated application; the input is not modified."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    state = np.asarray(state)
    if state.shape != (op.n_arcs,):
        raise ShapeError(f"state has shape {state.shape}, expected ({op.n_arcs},)")
    out = state.astype(complex, copy=True)
    for _ in range(steps):
        out = op.apply(out)
    return out


def success_probability(graph: Graph, sign: SignFunction, tau: int, cap: int | None = None) -> float:
    op = evolution_operator(graph, sign, cap=cap)
    psi = evolve(op, uniform_state(graph), tau)
    return float(np.sum(np.abs(psi[list(sign.marked)]) ** 2))


@dataclass(frozen=True)
class SearchTrace:
    tau: np.ndarray
    probability: np.ndarray
    marked_arcs: tuple[Arc, ...]
    graph: Graph

    def rows(self) -> list[dict]:
        return [{"tau": int(t), "probability": float(p)} for t, p in zip(self.tau, self.probability)]

    def to_json(self) -> dict:
        return {
            "graph": self.graph.descriptor(),
            "marked_arc": [[self.graph.label_of(a.origin), self.graph.label_of(a.terminus)] for a in self.marked_arcs],
            "marked_index": [self.graph.arc_index(a) for a in self.marked_arcs],
            "trace": self.rows(),
        }


def amplitude_trace(op: WalkOperator, tau_max: int, arcs=None) -> np.ndarray:
    """Amplitudes of ``U^tau j`` for ``tau = 0..tau_max`` on ``arcs`` (all by default).

    Returned shape is ``(tau_max + 1, len(arcs))``.
    """
    idx = np.arange(op.n_arcs) if arcs is None else np.array([op.graph.arc_index(a) for a in arcs], dtype=np.int64)
    out = np.empty((tau_max + 1, idx.size), dtype=complex)
    psi = uniform_state(op.graph)
    out[0] = psi[idx]
    for tau in range(1, tau_max + 1):
        psi = op.apply(psi)
        out[tau] = psi[idx]
    return out


def probability_trace(
    graph: Graph, sign: SignFunction, tau_max: int, cap: int | None = None
) -> SearchTrace:
    if tau_max < 0:
        raise ValueError("tau_max must be non-negative")
    op = evolution_operator(graph, sign, cap=cap)
    if not op.is_dense:
        log.info("%d arcs above dense cap %d: simulating matrix-free", graph.n_arcs, op.dense_cap)
    amps = amplitude_trace(op, tau_max, arcs=sign.marked)
    probs = np.sum(np.abs(amps) ** 2, axis=1)
    return SearchTrace(np.arange(tau_max + 1), probs, sign.marked_arcs, graph)
