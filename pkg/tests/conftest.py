import numpy as np
import pytest
from hypothesis import strategies as st

from arcwalk import build_complete_bipartite, build_cycle, build_path, from_edge_list


@st.composite
def connected_graphs(draw, max_vertices=8):
    n = draw(st.integers(min_value=2, max_value=max_vertices))
    parents = [draw(st.integers(min_value=0, max_value=v - 1)) for v in range(1, n)]
    edges = {(p, v) for v, p in zip(range(1, n), parents)}
    pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs), unique=True)) if pairs else []
    edges.update(extra)
    return from_edge_list(sorted(edges), n_vertices=n)


@st.composite
def graphs_with_arc(draw, max_vertices=8):
    g = draw(connected_graphs(max_vertices))
    return g, draw(st.integers(min_value=0, max_value=g.n_arcs - 1))


NAMED = {
    "P2": lambda: build_path(2),
    "P3": lambda: build_path(3),
    "P5": lambda: build_path(5),
    "C3": lambda: build_cycle(3),
    "C4": lambda: build_cycle(4),
    "C6": lambda: build_cycle(6),
    "K1,3": lambda: build_complete_bipartite(1, 3),
    "K2,2": lambda: build_complete_bipartite(2, 2),
    "K2,3": lambda: build_complete_bipartite(2, 3),
    "K3,3": lambda: build_complete_bipartite(3, 3),
    "petal": lambda: from_edge_list([(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]),
}


@pytest.fixture(params=sorted(NAMED))
def named_graph(request):
    return NAMED[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
