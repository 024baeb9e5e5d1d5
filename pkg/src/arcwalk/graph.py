"""Simple undirected graphs with a canonical arc ordering.

Edges are stored sorted by ``(min, max)`` endpoint.  Edge ``k`` owns arc
``2k`` (low -> high) and arc ``2k + 1`` (high -> low), so the inverse of arc
``i`` is always ``i ^ 1``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple, Sequence

import numpy as np

from .exceptions import (
    EdgeListFormatError,
    InvalidEdgeError,
    InvalidParameterError,
    IsolatedVertexError,
    UnknownArcError,
)

DEFAULT_DENSE_CAP = 4096
DENSE_CAP_ENV = "ARCWALK_DENSE_CAP"


def dense_cap(override: int | None = None) -> int:
    """Arc count up to which arc-space operators are stored densely."""
    if override is not None:
        return int(override)
    raw = os.environ.get(DENSE_CAP_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_DENSE_CAP
    try:
        value = int(raw)
    except ValueError:
        raise InvalidParameterError(f"{DENSE_CAP_ENV} must be an integer, got {raw!r}") from None
    if value < 0:
        raise InvalidParameterError(f"{DENSE_CAP_ENV} must be non-negative")
    return value


class Arc(NamedTuple):
    origin: int
    terminus: int

    @property
    def inverse(self) -> "Arc":
        return Arc(self.terminus, self.origin)

    def __str__(self) -> str:
        return f"({self.origin},{self.terminus})"


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0 .. n_vertices - 1``.

    Use the ``build_*`` constructors or :func:`from_edge_list` rather than
    instantiating directly; they normalise the edge order.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""
    labels: tuple[Hashable, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n_vertices < 1:
            raise InvalidParameterError("a graph needs at least one vertex")
        seen = set()
        for x, y in self.edges:
            if x == y:
                raise InvalidEdgeError(f"self-loop at vertex {x}")
            if not (0 <= x < self.n_vertices and 0 <= y < self.n_vertices):
                raise InvalidEdgeError(f"edge ({x},{y}) has an endpoint outside 0..{self.n_vertices - 1}")
            if x > y:
                raise InvalidEdgeError(f"edge ({x},{y}) is not stored as (low, high)")
            if (x, y) in seen:
                raise InvalidEdgeError(f"duplicate edge ({x},{y})")
            seen.add((x, y))
        if list(self.edges) != sorted(self.edges):
            raise InvalidEdgeError("edges must be sorted in canonical order")
        deg = self.degree
        isolated = np.flatnonzero(deg == 0)
        if isolated.size:
            raise IsolatedVertexError(f"isolated vertices: {isolated.tolist()}")

    # -- sizes ------------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_arcs(self) -> int:
        return 2 * len(self.edges)

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for x, y in self.edges:
            deg[x] += 1
            deg[y] += 1
        deg.flags.writeable = False
        return deg

    # -- arcs -------------------------------------------------------------

    @cached_property
    def origins(self) -> np.ndarray:
        out = np.empty(self.n_arcs, dtype=np.int64)
        for k, (x, y) in enumerate(self.edges):
            out[2 * k] = x
            out[2 * k + 1] = y
        out.flags.writeable = False
        return out

    @cached_property
    def termini(self) -> np.ndarray:
        out = np.empty(self.n_arcs, dtype=np.int64)
        for k, (x, y) in enumerate(self.edges):
            out[2 * k] = y
            out[2 * k + 1] = x
        out.flags.writeable = False
        return out

    @cached_property
    def inverse_index(self) -> np.ndarray:
        """``inverse_index[i]`` is the index of the inverse of arc ``i``."""
        out = np.arange(self.n_arcs, dtype=np.int64) ^ 1
        out.flags.writeable = False
        return out

    @cached_property
    def arcs(self) -> tuple[Arc, ...]:
        return tuple(Arc(int(o), int(t)) for o, t in zip(self.origins, self.termini))

    @cached_property
    def _arc_lookup(self) -> dict[tuple[int, int], int]:
        return {tuple(a): i for i, a in enumerate(self.arcs)}

    @cached_property
    def adjacency(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._arc_lookup)

    def has_edge(self, x: int, y: int) -> bool:
        return (x, y) in self._arc_lookup

    def arc_index(self, arc) -> int:
        """Canonical index of ``arc``; accepts an ``Arc``, a pair or an index."""
        if isinstance(arc, (int, np.integer)):
            i = int(arc)
            if not 0 <= i < self.n_arcs:
                raise UnknownArcError(f"arc index {i} out of range 0..{self.n_arcs - 1}")
            return i
        try:
            key = (int(arc[0]), int(arc[1]))
        except (TypeError, IndexError, ValueError):
            raise UnknownArcError(f"cannot interpret {arc!r} as an arc") from None
        try:
            return self._arc_lookup[key]
        except KeyError:
            raise UnknownArcError(f"{key} is not an arc of this graph") from None

    def arc(self, index: int) -> Arc:
        return self.arcs[self.arc_index(index)]

    def neighbors(self, x: int) -> list[int]:
        return [int(t) for o, t in zip(self.origins, self.termini) if o == x]

    def edge_list(self) -> list[tuple[int, int]]:
        return list(self.edges)

    def label_of(self, vertex: int) -> Hashable:
        return vertex if self.labels is None else self.labels[vertex]

    def descriptor(self) -> dict:
        """JSON-friendly summary used in reports."""
        out = {
            "name": self.name,
            "n_vertices": self.n_vertices,
            "n_edges": self.n_edges,
            "n_arcs": self.n_arcs,
        }
        if self.labels is not None:
            out["labels"] = [int(lab) for lab in self.labels]
        return out

    def __repr__(self) -> str:
        tag = self.name or "Graph"
        return f"<{tag}: |V|={self.n_vertices}, |E|={self.n_edges}>"


def _normalise(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    edges = set()
    for x, y in pairs:
        if x == y:
            raise InvalidEdgeError(f"self-loop at vertex {x}")
        edges.add((min(x, y), max(x, y)))
    return tuple(sorted(edges))


def build_path(n: int) -> Graph:
    if n < 2:
        raise InvalidParameterError(f"path graph needs n >= 2, got {n}")
    return Graph(n, _normalise((i, i + 1) for i in range(n - 1)), name=f"P{n}")


def build_cycle(n: int) -> Graph:
    if n < 3:
        raise InvalidParameterError(f"cycle graph needs n >= 3, got {n}")
    return Graph(n, _normalise((i, (i + 1) % n) for i in range(n)), name=f"C{n}")


def build_complete_bipartite(m: int, n: int) -> Graph:
    """K_{m,n} with parts ``{0..m-1}`` and ``{m..m+n-1}``."""
    if m < 1 or n < 1:
        raise InvalidParameterError(f"K_(m,n) needs m, n >= 1, got ({m},{n})")
    pairs = ((x, m + y) for x in range(m) for y in range(n))
    return Graph(m + n, _normalise(pairs), name=f"K{m},{n}")


def from_edge_list(
    pairs: Sequence[tuple[Hashable, Hashable]],
    n_vertices: int | None = None,
    name: str = "",
) -> Graph:
    """Build a graph from vertex pairs, dropping duplicate edges.

    With ``n_vertices`` given the pairs must already be integer ids in
    ``range(n_vertices)``.  Otherwise arbitrary sortable labels are remapped
    to dense ids in sorted label order and the mapping is kept on
    ``Graph.labels`` (omitted when it is the identity).
    """
    pairs = list(pairs)
    for x, y in pairs:
        if x == y:
            raise InvalidEdgeError(f"self-loop at vertex {x!r}")
    if n_vertices is not None:
        ids = [(int(x), int(y)) for x, y in pairs]
        return Graph(int(n_vertices), _normalise(ids), name=name)
    if not pairs:
        raise InvalidParameterError("empty edge list")
    labels = sorted({v for pair in pairs for v in pair})
    index = {lab: i for i, lab in enumerate(labels)}
    ids = [(index[x], index[y]) for x, y in pairs]
    identity = all(isinstance(lab, (int, np.integer)) and lab == i for i, lab in enumerate(labels))
    return Graph(len(labels), _normalise(ids), name=name, labels=None if identity else tuple(labels))


def parse_edge_list(text: str) -> list[tuple[int, int]]:
    """Parse the edge-list text format (two non-negative ints per line)."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListFormatError(f"line {lineno}: expected two labels, got {len(parts)}")
        try:
            x, y = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListFormatError(f"line {lineno}: labels must be integers") from None
        if x < 0 or y < 0:
            raise EdgeListFormatError(f"line {lineno}: labels must be non-negative")
        pairs.append((x, y))
    return pairs


def read_edge_list(path: str | os.PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        pairs = parse_edge_list(fh.read())
    return from_edge_list(pairs, name=os.path.basename(os.fspath(path)))


def write_edge_list(graph: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {graph.name or 'graph'}: {graph.n_vertices} vertices, {graph.n_edges} edges\n")
        for x, y in graph.edges:
            fh.write(f"{graph.label_of(x)} {graph.label_of(y)}\n")


def boundary_matrix(graph: Graph) -> np.ndarray:
    """``d[x, a] = 1/sqrt(deg x)`` when ``x`` is the terminus of ``a``."""
    d = np.zeros((graph.n_vertices, graph.n_arcs))
    cols = np.arange(graph.n_arcs)
    d[graph.termini, cols] = 1.0 / np.sqrt(graph.degree[graph.termini])
    return d


def shift_matrix(graph: Graph) -> np.ndarray:
    """Permutation matrix sending each arc to its inverse."""
    s = np.zeros((graph.n_arcs, graph.n_arcs), dtype=np.int64)
    s[np.arange(graph.n_arcs), graph.inverse_index] = 1
    return s.astype(float)
