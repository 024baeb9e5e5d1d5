import itertools

import numpy as np
import pytest
from hypothesis import given, settings

from arcwalk import (
    Arc,
    Automorphism,
    InvalidAutomorphismError,
    ResourceLimitError,
    arc_action,
    arc_orbits,
    automorphisms,
    build_complete_bipartite,
    build_cycle,
    build_path,
    check_conjugation,
    check_intertwining,
    from_edge_list,
    orbit_invariance_check,
)
from arcwalk.symmetry import (
    arc_permutation,
    arc_permutation_matrix,
    conjugation_sweep,
    generate_group,
    is_automorphism,
    orbit_report,
    vertex_permutation_matrix,
)
from arcwalk.verify import knn_generators

from conftest import connected_graphs


def brute_force_automorphisms(g):
    return {p for p in itertools.permutations(range(g.n_vertices)) if is_automorphism(g, p)}


def brute_force_orbits(g, autos):
    orbits = set()
    for arc in g.arcs:
        orbits.add(frozenset(g.arc_index((p[arc.origin], p[arc.terminus])) for p in autos))
    return orbits


@pytest.mark.parametrize(
    "g, count",
    [(build_cycle(4), 8), (build_path(3), 2), (build_complete_bipartite(2, 2), 8), (build_complete_bipartite(1, 3), 6)],
)
def test_automorphism_counts(g, count):
    found = {a.vertex_map for a in automorphisms(g)}
    assert found == brute_force_automorphisms(g)
    assert len(found) == count


@given(connected_graphs(max_vertices=7))
@settings(max_examples=40, deadline=None)
def test_automorphisms_match_brute_force(g):
    found = [a.vertex_map for a in automorphisms(g)]
    assert len(found) == len(set(found))
    assert set(found) == brute_force_automorphisms(g)


def test_automorphism_cap():
    with pytest.raises(ResourceLimitError):
        automorphisms(build_cycle(11))
    assert len(automorphisms(build_cycle(11), vertex_cap=11)) == 22


def test_arc_action():
    g = build_cycle(4)
    identity = Automorphism.identity(4)
    rot = Automorphism((1, 2, 3, 0))
    for arc in g.arcs:
        assert arc_action(g, identity, arc) == arc
        assert arc_action(g, rot, arc.inverse) == arc_action(g, rot, arc).inverse
    assert arc_action(g, rot, (0, 1)) == Arc(1, 2)
    p = arc_permutation(g, rot)
    assert sorted(p.tolist()) == list(range(g.n_arcs))


def test_permutation_matrix_identities(named_graph):
    g = named_graph
    for auto in automorphisms(g):
        m = vertex_permutation_matrix(auto)
        n = arc_permutation_matrix(g, auto)
        assert np.array_equal(m.T, np.linalg.inv(m))
        assert np.array_equal(m.T, vertex_permutation_matrix(auto.inverse()))
        assert np.array_equal(n.T, arc_permutation_matrix(g, auto.inverse()))
        for x in range(g.n_vertices):
            assert np.argmax(m[:, x]) == auto(x)
        for i, arc in enumerate(g.arcs):
            assert np.argmax(n[:, i]) == g.arc_index(arc_action(g, auto, arc))


def test_orbits_examples():
    c6 = build_cycle(6)
    assert arc_orbits(c6, automorphisms(c6)).arc_transitive
    p3 = build_path(3)
    orbits = arc_orbits(p3, automorphisms(p3))
    named = {frozenset(p3.arcs[i] for i in orb) for orb in orbits.orbits}
    assert named == {frozenset({(0, 1), (2, 1)}), frozenset({(1, 0), (1, 2)})}
    for n in (2, 3, 4):
        g = build_complete_bipartite(n, n)
        assert arc_orbits(g, automorphisms(g)).arc_transitive
    assert not arc_orbits(build_complete_bipartite(2, 3), automorphisms(build_complete_bipartite(2, 3))).arc_transitive


@given(connected_graphs(max_vertices=7))
@settings(max_examples=40, deadline=None)
def test_orbits_match_brute_force(g):
    autos = automorphisms(g)
    part = arc_orbits(g, autos)
    assert {frozenset(o) for o in part.orbits} == brute_force_orbits(g, [a.vertex_map for a in autos])
    # partition and closed under every automorphism
    assert sorted(i for o in part.orbits for i in o) == list(range(g.n_arcs))
    for a in autos:
        p = arc_permutation(g, a)
        assert all(part.orbit_of[p[i]] == part.orbit_of[i] for i in range(g.n_arcs))


def test_orbits_from_generators_only():
    g = build_complete_bipartite(6, 6)
    part = arc_orbits(g, knn_generators(6))
    assert part.arc_transitive


def test_generate_group():
    g = build_complete_bipartite(3, 3)
    group = generate_group(knn_generators(3), 6)
    assert {a.vertex_map for a in group} == {a.vertex_map for a in automorphisms(g)}
    assert len(group) == 72


def test_intertwining(named_graph):
    for auto in automorphisms(named_graph):
        rep = check_intertwining(named_graph, auto)
        assert rep.passed, rep


def test_intertwining_identity_is_zero():
    g = build_cycle(6)
    rep = check_intertwining(g, Automorphism.identity(6))
    assert rep.boundary_residual == 0 and rep.shift_residual == 0


def test_non_automorphism_rejected():
    g = build_path(4)
    with pytest.raises(InvalidAutomorphismError):
        check_intertwining(g, (1, 0, 2, 3))
    with pytest.raises(InvalidAutomorphismError):
        check_conjugation(g, (0, 0, 2, 3), 0)


def test_conjugation_examples():
    g = build_complete_bipartite(2, 2)
    swap = Automorphism((1, 0, 2, 3))
    for a in range(g.n_arcs):
        assert check_conjugation(g, Automorphism.identity(4), a).walk_residual == 0
        rep = check_conjugation(g, swap, a)
        assert rep.walk_residual <= 1e-14 and rep.oracle_residual == 0
    c5 = build_cycle(5)
    rep = check_conjugation(c5, Automorphism((1, 2, 3, 4, 0)), (0, 1))
    assert rep.image == Arc(1, 2)
    assert rep.walk_residual <= 1e-14


def test_conjugation_matrix_free_route():
    g = build_cycle(5)
    auto = Automorphism((4, 3, 2, 1, 0))
    dense = check_conjugation(g, auto, 3)
    free = check_conjugation(g, auto, 3, cap=0)
    assert dense.passed and free.passed
    assert free.walk_residual <= 1e-14


def test_conjugation_fails_for_wrong_image():
    # sanity: without a matching marked arc the identity does not hold
    g = build_path(4)
    from arcwalk import WalkOperator, single_arc_sign

    ua = WalkOperator(g, single_arc_sign(g, 0)).matrix()
    ub = WalkOperator(g, single_arc_sign(g, 2)).matrix()
    assert np.max(np.abs(ua - ub)) > 0.1


@pytest.mark.parametrize("g", [build_path(4), build_cycle(5), build_complete_bipartite(2, 3), build_complete_bipartite(1, 3)])
def test_sweep_agrees_with_dense_check(g):
    autos = automorphisms(g)
    dense_worst = max(check_conjugation(g, a, arc).walk_residual for a in autos for arc in range(g.n_arcs))
    assert conjugation_sweep(g, autos) == pytest.approx(dense_worst, abs=1e-15)


def test_sweep_rejects_non_automorphism():
    g = build_path(4)
    with pytest.raises(InvalidAutomorphismError):
        conjugation_sweep(g, [Automorphism((0, 2, 1, 3))])
    g = from_edge_list([(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    assert conjugation_sweep(g, [Automorphism((0, 3, 2, 1))]) <= 1e-14


def test_orbit_invariance_k33():
    rep = orbit_invariance_check(build_complete_bipartite(3, 3), 50)
    assert rep.partition.arc_transitive
    assert rep.passed
    assert np.max(np.abs(rep.amplitudes - rep.amplitudes[:, :1])) <= 1e-10


def test_orbit_invariance_p4_orbit_classes():
    g = build_path(4)
    rep = orbit_invariance_check(g, 60)
    assert rep.passed
    assert len(rep.partition) == 3
    # flat 1/(2n-2) on paths: all orbits coincide, a converse candidate
    assert len(rep.coincident_orbits()) == 3


def test_orbit_invariance_distinguishes_orbits():
    g = from_edge_list([(0, 1), (1, 2), (0, 2), (2, 3)])
    rep = orbit_invariance_check(g, 30)
    assert rep.passed
    probs = rep.probabilities
    reps = [orb[0] for orb in rep.partition.orbits]
    spread = max(np.max(np.abs(probs[:, r] - probs[:, reps[0]])) for r in reps)
    assert spread > 1e-3


def test_orbit_invariance_c3():
    rep = orbit_invariance_check(build_cycle(3), 40)
    assert np.max(np.abs(rep.probabilities - 1 / 6)) <= 1e-12


def test_orbit_report():
    g = build_path(3)
    data = orbit_report(g, automorphisms(g))
    assert data["n_automorphisms"] == 2 and not data["arc_transitive"]
    assert sorted(map(sorted, data["orbits"])) == [[[0, 1], [2, 1]], [[1, 0], [1, 2]]]
