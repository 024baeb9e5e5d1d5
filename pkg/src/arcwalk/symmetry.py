"""Graph automorphisms, their action on arcs, and the walk's symmetry identities."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import InvalidAutomorphismError, ResourceLimitError
from .graph import Arc, Graph, boundary_matrix, dense_cap, shift_matrix
from .walk import WalkOperator, amplitude_trace, oracle_matrix, single_arc_sign

DEFAULT_VERTEX_CAP = 10


@dataclass(frozen=True)
class Automorphism:
    """A vertex permutation ``x -> vertex_map[x]``."""

    vertex_map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.vertex_map[x]

    def __len__(self) -> int:
        return len(self.vertex_map)

    @classmethod
    def identity(cls, n: int) -> "Automorphism":
        return cls(tuple(range(n)))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self`` after ``other``."""
        return Automorphism(tuple(self.vertex_map[other.vertex_map[x]] for x in range(len(self))))

    def inverse(self) -> "Automorphism":
        inv = [0] * len(self)
        for x, gx in enumerate(self.vertex_map):
            inv[gx] = x
        return Automorphism(tuple(inv))


def is_automorphism(graph: Graph, vertex_map: Sequence[int]) -> bool:
    n = graph.n_vertices
    if len(vertex_map) != n or sorted(vertex_map) != list(range(n)):
        return False
    images = {(vertex_map[x], vertex_map[y]) for x, y in graph.adjacency}
    return images == set(graph.adjacency)


def validate_automorphism(graph: Graph, auto) -> Automorphism:
    vmap = tuple(int(v) for v in (auto.vertex_map if isinstance(auto, Automorphism) else auto))
    if not is_automorphism(graph, vmap):
        raise InvalidAutomorphismError(f"{vmap} is not an automorphism of {graph!r}")
    return Automorphism(vmap)


def automorphisms(graph: Graph, vertex_cap: int = DEFAULT_VERTEX_CAP) -> list[Automorphism]:
    """Every automorphism, by backtracking with degree and adjacency pruning."""
    n = graph.n_vertices
    if n > vertex_cap:
        raise ResourceLimitError(
            f"{n} vertices exceeds the enumeration cap {vertex_cap}; supply generators instead"
        )
    deg = graph.degree
    nbrs = [set(graph.neighbors(x)) for x in range(n)]
    # BFS order so each new vertex tends to have assigned neighbours
    order, seen = [], set()
    for root in sorted(range(n), key=lambda v: (-deg[v], v)):
        if root in seen:
            continue
        seen.add(root)
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(nbrs[v]):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)

    image = [-1] * n
    used = [False] * n
    found: list[Automorphism] = []

    def extend(depth: int) -> None:
        if depth == n:
            found.append(Automorphism(tuple(image)))
            return
        v = order[depth]
        for c in range(n):
            if used[c] or deg[c] != deg[v]:
                continue
            ok = True
            for u in order[:depth]:
                if (u in nbrs[v]) != (image[u] in nbrs[c]):
                    ok = False
                    break
            if not ok:
                continue
            image[v], used[c] = c, True
            extend(depth + 1)
            image[v], used[c] = -1, False

    extend(0)
    return found


def generate_group(generators: Iterable[Automorphism], n: int, limit: int = 1_000_000) -> list[Automorphism]:
    """Closure of ``generators`` under composition (breadth-first)."""
    gens = [g for g in generators]
    start = Automorphism.identity(n)
    seen = {start.vertex_map}
    out = [start]
    queue = deque([start])
    while queue:
        h = queue.popleft()
        for g in gens:
            k = g.compose(h)
            if k.vertex_map not in seen:
                if len(seen) >= limit:
                    raise ResourceLimitError(f"group closure exceeded {limit} elements")
                seen.add(k.vertex_map)
                out.append(k)
                queue.append(k)
    return out


def arc_action(graph: Graph, auto: Automorphism, arc) -> Arc:
    a = graph.arc(graph.arc_index(arc))
    return Arc(auto(a.origin), auto(a.terminus))


def arc_permutation(graph: Graph, auto: Automorphism) -> np.ndarray:
    """``p[i]`` is the index of the image of arc ``i``."""
    return np.array([graph.arc_index((auto(o), auto(t))) for o, t in graph.arcs], dtype=np.int64)


def vertex_permutation_matrix(auto: Automorphism) -> np.ndarray:
    n = len(auto)
    m = np.zeros((n, n))
    m[list(auto.vertex_map), np.arange(n)] = 1.0
    return m


def arc_permutation_matrix(graph: Graph, auto: Automorphism) -> np.ndarray:
    p = arc_permutation(graph, auto)
    m = np.zeros((graph.n_arcs, graph.n_arcs))
    m[p, np.arange(graph.n_arcs)] = 1.0
    return m


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        x, y = self.find(x), self.find(y)
        if x == y:
            return
        if self.rank[x] < self.rank[y]:
            x, y = y, x
        elif self.rank[x] == self.rank[y]:
            self.rank[x] += 1
        self.parent[y] = x


@dataclass(frozen=True)
class OrbitPartition:
    orbits: tuple[tuple[int, ...], ...]
    orbit_of: tuple[int, ...]

    @property
    def arc_transitive(self) -> bool:
        return len(self.orbits) == 1

    def __len__(self) -> int:
        return len(self.orbits)


def arc_orbits(graph: Graph, autos: Iterable[Automorphism]) -> OrbitPartition:
    """Arc orbits of the group generated by ``autos``.

    Orbits of a generated group are the connected components of the
    generator images, so no closure is needed.
    """
    uf = UnionFind(graph.n_arcs)
    for g in autos:
        for i, j in enumerate(arc_permutation(graph, g)):
            uf.union(i, int(j))
    groups: dict[int, list[int]] = {}
    for i in range(graph.n_arcs):
        groups.setdefault(uf.find(i), []).append(i)
    orbits = tuple(sorted(tuple(v) for v in groups.values()))
    orbit_of = [0] * graph.n_arcs
    for k, orb in enumerate(orbits):
        for i in orb:
            orbit_of[i] = k
    return OrbitPartition(orbits, tuple(orbit_of))


def orbit_report(graph: Graph, autos: Sequence[Automorphism]) -> dict:
    part = arc_orbits(graph, autos)
    return {
        "graph": graph.descriptor(),
        "orbits": [[[graph.label_of(graph.arcs[i].origin), graph.label_of(graph.arcs[i].terminus)] for i in orb]
                   for orb in part.orbits],
        "arc_transitive": part.arc_transitive,
        "n_automorphisms": len(autos),
    }


@dataclass(frozen=True)
class IntertwiningReport:
    boundary_residual: float
    shift_residual: float
    tol: float = 1e-14

    @property
    def passed(self) -> bool:
        return self.boundary_residual <= self.tol and self.shift_residual <= self.tol


def check_intertwining(graph: Graph, auto) -> IntertwiningReport:
    """Residuals of ``d N = M d`` and ``S N = N S``."""
    auto = validate_automorphism(graph, auto)
    d, s = boundary_matrix(graph), shift_matrix(graph)
    m, nm = vertex_permutation_matrix(auto), arc_permutation_matrix(graph, auto)
    return IntertwiningReport(
        float(np.max(np.abs(d @ nm - m @ d), initial=0.0)),
        float(np.max(np.abs(s @ nm - nm @ s), initial=0.0)),
    )


@dataclass(frozen=True)
class ConjugationReport:
    arc: Arc
    image: Arc
    walk_residual: float
    oracle_residual: float
    tol: float = 1e-12

    @property
    def passed(self) -> bool:
        return self.walk_residual <= self.tol and self.oracle_residual <= self.tol


def check_conjugation(graph: Graph, auto, arc, cap: int | None = None) -> ConjugationReport:
    """Residual of ``N^* U_b N = U_a`` (and the oracle analogue) with ``b`` the image of ``a``."""
    auto = validate_automorphism(graph, auto)
    a = graph.arc(graph.arc_index(arc))
    b = arc_action(graph, auto, a)
    sa, sb = single_arc_sign(graph, a), single_arc_sign(graph, b)
    p = arc_permutation(graph, auto)
    oa, ob = oracle_matrix(sa), oracle_matrix(sb)
    nm = arc_permutation_matrix(graph, auto)
    oracle_res = float(np.max(np.abs(nm.T @ ob @ nm - oa)))
    ua_op, ub_op = WalkOperator(graph, sa, cap=cap), WalkOperator(graph, sb, cap=cap)
    if ua_op.is_dense:
        walk_res = float(np.max(np.abs(nm.T @ ub_op.matrix() @ nm - ua_op.matrix())))
    else:
        # column z of N^* U_b N is U_b e_{p(z)} pulled back through p
        walk_res = 0.0
        for z in range(graph.n_arcs):
            e = np.zeros(graph.n_arcs)
            e[z] = 1.0
            col_a = ua_op.apply(e).real
            e_img = np.zeros(graph.n_arcs)
            e_img[p[z]] = 1.0
            col_b = ub_op.apply(e_img).real[p]
            walk_res = max(walk_res, float(np.max(np.abs(col_b - col_a))))
    return ConjugationReport(a, b, walk_res, oracle_res)


def conjugation_sweep(graph: Graph, autos: Iterable[Automorphism]) -> float:
    """Max conjugation residual over every automorphism in ``autos`` and every arc.

    Each ``U_a`` vanishes outside the positions ``(z, w)`` with
    ``o(z) = t(w)``.  The dense residual ``max |U_b[p z, p w] - U_a[z, w]|``
    is therefore attained either on that pattern or on its preimage under
    ``p``, which keeps the sweep at ``O(|arcs| * pattern)`` per automorphism.
    """
    n_arcs = graph.n_arcs
    if n_arcs > dense_cap():
        raise ResourceLimitError("conjugation sweep needs dense operators")
    stack = np.stack([WalkOperator(graph, single_arc_sign(graph, a)).matrix() for a in range(n_arcs)])
    flat = stack.reshape(-1)
    zs, ws = np.nonzero(graph.origins[:, None] == graph.termini[None, :])
    arcs = np.arange(n_arcs)[:, None]
    sq = n_arcs * n_arcs
    base = arcs * sq + zs[None, :] * n_arcs + ws[None, :]
    worst = 0.0
    for g in autos:
        p = arc_permutation(graph, validate_automorphism(graph, g))
        pinv = np.empty_like(p)
        pinv[p] = np.arange(n_arcs)
        pa = p[:, None]
        fwd = flat[pa * sq + p[zs][None, :] * n_arcs + p[ws][None, :]] - flat[base]
        # on the pattern of U_b: compare with U_a at the preimage positions
        bwd = flat[pa * sq + zs[None, :] * n_arcs + ws[None, :]] - flat[arcs * sq + pinv[zs][None, :] * n_arcs + pinv[ws][None, :]]
        worst = max(worst, float(np.max(np.abs(fwd))), float(np.max(np.abs(bwd))))
    return worst


@dataclass
class InvarianceReport:
    graph: Graph
    partition: OrbitPartition
    amplitudes: np.ndarray  # (tau_max + 1, n_arcs): column a is (U_a^tau j)_a
    tol: float = 1e-10

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def orbit_deviation(self, which: str = "probability") -> list[float]:
        data = self.probabilities if which == "probability" else self.amplitudes
        out = []
        for orb in self.partition.orbits:
            block = data[:, list(orb)]
            out.append(float(np.max(np.abs(block - block[:, :1]), initial=0.0)))
        return out

    @property
    def max_probability_deviation(self) -> float:
        return max(self.orbit_deviation("probability"), default=0.0)

    @property
    def max_amplitude_deviation(self) -> float:
        return max(self.orbit_deviation("amplitude"), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_probability_deviation <= self.tol and self.max_amplitude_deviation <= self.tol

    def coincident_orbits(self) -> list[tuple[int, int]]:
        """Pairs of distinct orbits whose probability traces agree anyway."""
        probs = self.probabilities
        reps = [orb[0] for orb in self.partition.orbits]
        pairs = []
        for i in range(len(reps)):
            for j in range(i + 1, len(reps)):
                if np.max(np.abs(probs[:, reps[i]] - probs[:, reps[j]])) <= self.tol:
                    pairs.append((i, j))
        return pairs

    def rows(self) -> list[dict]:
        g = self.graph
        out = []
        for k, orb in enumerate(self.partition.orbits):
            for i in orb:
                arc = g.arcs[i]
                name = f"{g.label_of(arc.origin)}-{g.label_of(arc.terminus)}"
                for tau in range(self.amplitudes.shape[0]):
                    out.append({"orbit_id": k, "arc": name, "tau": tau, "probability": float(self.probabilities[tau, i])})
        return out


def orbit_invariance_check(
    graph: Graph,
    tau_max: int,
    autos: Sequence[Automorphism] | None = None,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> InvarianceReport:
    """Simulate every single-arc search and compare traces within each orbit."""
    if autos is None:
        autos = automorphisms(graph, vertex_cap)
    part = arc_orbits(graph, autos)
    amps = np.empty((tau_max + 1, graph.n_arcs), dtype=complex)
    for a in range(graph.n_arcs):
        op = WalkOperator(graph, single_arc_sign(graph, a))
        amps[:, a] = amplitude_trace(op, tau_max, arcs=[a])[:, 0]
    return InvarianceReport(graph, part, amps)
