import math

import numpy as np
import pytest
from hypothesis import given, settings

from arcwalk import (
    DegenerateLiftError,
    ResourceLimitError,
    SignFunction,
    beta_concentration,
    beta_vectors,
    build_complete_bipartite,
    build_cycle,
    discriminant,
    discriminant_entry,
    evolution_operator,
    evolve,
    knn_closed_form,
    lift_eigenpair,
    lower_bound_terms,
    measurement_time,
    signed_boundary,
    single_arc_sign,
    spectral_report,
    success_at_tstar,
    success_probability,
    uniform_state,
)
from arcwalk.spectral import (
    arccos_bounds,
    beta_sandwich,
    discriminant_eigenpairs,
    exact_lower_bound,
    explicit_deficit,
    explicit_lower_bound,
    knn_marked,
    knn_report,
    schur_evolve,
)

from conftest import graphs_with_arc


def closed_form_f(n):
    """Eigenvector of the largest discriminant eigenvalue of K_{n,n} with (0, n) marked."""
    cf = knn_closed_form(n)
    f = np.full(2 * n, cf.f_other)
    f[[0, n]] = cf.f_marked
    return f


# --- discriminant ---------------------------------------------------------


def test_discriminant_unsigned_is_normalised_adjacency():
    g = build_complete_bipartite(2, 3)
    t = discriminant(g, SignFunction.all_positive(g))
    adj = np.zeros((5, 5))
    for x, y in g.edges:
        adj[x, y] = adj[y, x] = 1 / math.sqrt(g.degree[x] * g.degree[y])
    assert np.max(np.abs(t - adj)) <= 1e-15


@given(graphs_with_arc())
@settings(max_examples=80, deadline=None)
def test_discriminant_triple_product_matches_entries(case):
    g, a = case
    s = single_arc_sign(g, a)
    t = discriminant(g, s)
    entries = np.array([[discriminant_entry(g, s, x, y) for y in range(g.n_vertices)] for x in range(g.n_vertices)])
    assert np.max(np.abs(t - entries)) <= 1e-14
    assert np.array_equal(t, t.T)
    assert np.max(np.abs(np.linalg.eigvalsh(t))) <= 1 + 1e-12


def test_discriminant_k22_marked_edge():
    g = build_complete_bipartite(2, 2)
    s = single_arc_sign(g, (0, 2))
    t = discriminant(g, s)
    assert t[0, 2] == pytest.approx(-0.5) and t[2, 0] == pytest.approx(-0.5)
    for x, y in [(0, 3), (1, 2), (1, 3)]:
        assert t[x, y] == pytest.approx(0.5)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_discriminant_entry_examples(n):
    g, s = knn_marked(n)
    assert discriminant_entry(g, s, 0, n) == pytest.approx(-1 / n, abs=1e-15)
    assert discriminant_entry(g, s, 0, 1) == 0.0
    assert discriminant_entry(g, s, 0, 0) == 0.0


# --- lifting --------------------------------------------------------------


@given(graphs_with_arc(max_vertices=7))
@settings(max_examples=50, deadline=None)
def test_spectral_containment(case):
    g, a = case
    s = single_arc_sign(g, a)
    u = evolution_operator(g, s).matrix()
    walk_eigs = np.linalg.eigvals(u)
    vals, vecs = discriminant_eigenpairs(g, s)
    for k, lam in enumerate(vals):
        if abs(lam) >= 1 - 1e-9:
            continue
        pair = lift_eigenpair(g, s, lam, vecs[:, k])
        for ev, phi in zip(pair.eigenvalues, (pair.phi_plus, pair.phi_minus)):
            assert np.min(np.abs(walk_eigs - ev)) <= 1e-6
            assert np.linalg.norm(u @ phi - ev * phi) <= 1e-9
            assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-10)
        assert np.max(np.abs(pair.phi_minus - pair.phi_plus.conj())) <= 1e-15


def test_lift_k22():
    g, s = knn_marked(2)
    vals, vecs = discriminant_eigenpairs(g, s)
    assert vals[0] == pytest.approx(math.sqrt(2) / 2, abs=1e-12)
    pair = lift_eigenpair(g, s, vals[0], vecs[:, 0])
    assert pair.theta == pytest.approx(math.pi / 4, abs=1e-12)
    u = evolution_operator(g, s).matrix()
    # oracle: the dense eigensolver has e^{i pi/4} in the spectrum
    assert np.min(np.abs(np.linalg.eigvals(u) - np.exp(1j * math.pi / 4))) <= 1e-9
    assert np.linalg.norm(u @ pair.phi_plus - pair.eigenvalues[0] * pair.phi_plus) <= 1e-9


def test_degenerate_lift():
    g = build_cycle(4)
    s = SignFunction.all_positive(g)
    f = np.full(4, 0.5)
    with pytest.raises(DegenerateLiftError):
        lift_eigenpair(g, s, 1.0, f)
    with pytest.raises(DegenerateLiftError):
        measurement_time(-1.0)
    with pytest.raises(DegenerateLiftError):
        beta_vectors(g, s, 1.0 - 1e-13, f)


@pytest.mark.parametrize("n", [2, 3, 6])
def test_dsigma_star_f_on_knn(n):
    g, s = knn_marked(n)
    f = closed_form_f(n)
    ds = signed_boundary(g, s)
    df = ds.T @ f
    sdf = df[g.inverse_index]
    for z, arc in enumerate(g.arcs):
        assert df[z] == pytest.approx(s(z) * f[arc.terminus] / math.sqrt(n), abs=1e-15)
        assert sdf[z] == pytest.approx(s(g.inverse_index[z]) * f[arc.origin] / math.sqrt(n), abs=1e-15)


# --- K_{n,n} closed forms -----------------------------------------------


def test_knn_closed_form_n2():
    cf = knn_closed_form(2)
    assert cf.delta == 8
    assert cf.lam == pytest.approx(math.sqrt(8) / 4, abs=1e-15)
    assert cf.mu == pytest.approx(cf.lam, abs=1e-15)
    assert cf.theta == pytest.approx(math.pi / 4, abs=1e-12)
    assert cf.t_star == 2
    g, s = knn_marked(2)
    assert np.max(np.linalg.eigvalsh(discriminant(g, s))) == pytest.approx(cf.lam, abs=1e-10)


@pytest.mark.parametrize("n", range(3, 40))
def test_delta_bracket(n):
    delta = knn_closed_form(n).delta
    assert (n + 1) ** 2 < delta < (n + 2) ** 2


@pytest.mark.parametrize("n", range(2, 16))
def test_closed_form_lambda_and_eigenvector(n):
    cf = knn_closed_form(n)
    g, s = knn_marked(n)
    vals, vecs = discriminant_eigenpairs(g, s)
    assert vals[0] == pytest.approx(cf.lam, rel=1e-10, abs=1e-12)
    if n >= 3:
        # lambda is simple; the sign convention fixes f uniquely
        assert np.max(np.abs(vecs[:, 0] - closed_form_f(n))) <= 1e-10
    f = closed_form_f(n)
    assert np.linalg.norm(f) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(discriminant(g, s) @ f - cf.lam * f)) <= 1e-12


def test_lambda_increases_to_one():
    lams = [knn_closed_form(n).lam for n in range(2, 201)]
    assert np.all(np.diff(lams) > 0)
    assert lams[-1] < 1 and lams[-1] > 0.9999


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_beta_vectors_knn(n):
    g, s = knn_marked(n)
    cf = knn_closed_form(n)
    f = closed_form_f(n)
    bp, bm = beta_vectors(g, s, cf.lam, f)
    a = s.marked[0]
    a_inv = g.inverse_index[a]
    assert bp[a] == pytest.approx(cf.beta_plus_a, rel=1e-10, abs=1e-12)
    assert bp[a_inv] == pytest.approx(-bp[a], abs=1e-12)
    assert np.linalg.norm(bp) == pytest.approx(1.0, abs=1e-12)
    ds = signed_boundary(g, s)
    assert np.max(np.abs(1j * bm - (ds.T @ f)[g.inverse_index])) <= 1e-12
    j = uniform_state(g)
    r = math.sqrt(cf.delta)
    expected = 2 - math.sqrt(2) * (n - 1) * (r + n) / (n * math.sqrt(n) * math.sqrt(cf.delta - n * r))
    assert np.linalg.norm(j - 1j * bm) ** 2 == pytest.approx(expected, abs=1e-12)
    assert np.linalg.norm(j - 1j * bm) == pytest.approx(cf.term_tail, abs=1e-12)


def test_beta_plus_is_real():
    g, s = knn_marked(5)
    pair = lift_eigenpair(g, s, knn_closed_form(5).lam, closed_form_f(5))
    assert np.max(np.abs((pair.phi_plus + pair.phi_minus).imag)) <= 1e-12


def test_beta_plus_norm_k22():
    g, s = knn_marked(2)
    vals, vecs = discriminant_eigenpairs(g, s)
    bp, _ = beta_vectors(g, s, vals[0], vecs[:, 0])
    assert np.linalg.norm(bp) == pytest.approx(1.0, abs=1e-12)


# --- measurement time and bounds -----------------------------------------


def test_measurement_time_examples():
    assert measurement_time(0.0) == 1
    assert measurement_time(math.sqrt(2) / 2) == 2
    assert measurement_time(math.cos(math.pi / 10)) == 5
    assert measurement_time(0.5) == 1  # pi / (2 pi/3) = 1.5


@pytest.mark.parametrize("n", [2, 5, 10, 50, 200])
def test_tstar_sandwich(n):
    cf = knn_closed_form(n)
    assert cf.t_star_lower <= cf.t_star <= cf.t_star_upper


def test_lower_bound_terms_vanish():
    small = lower_bound_terms(10)
    large = lower_bound_terms(10_000)
    assert large[1] < small[1] / 100 and large[2] < small[2] / 100
    assert large[0] == pytest.approx(1 / math.sqrt(2), abs=1e-3)


@pytest.mark.parametrize("n", [10, 30, 100, 1000])
def test_term_beta_beats_elementary_bound(n):
    lo, hi = beta_sandwich(n)
    assert lo < lower_bound_terms(n)[0] < hi


@pytest.mark.parametrize("n", range(2, 21))
def test_simulated_mid_term_below_bound(n):
    g, s = knn_marked(n)
    cf = knn_closed_form(n)
    bp, bm = beta_vectors(g, s, cf.lam, closed_form_f(n))
    op = evolution_operator(g, s)
    mid = np.linalg.norm(evolve(op, 1j * bm, cf.t_star) + bp)
    assert mid <= cf.term_mid_bound + 1e-10


# frozen from the loop-built matrix of tests/test_walk.py, powered with numpy.linalg.matrix_power
FROZEN_P_STAR = {
    2: (2, 0.12499999999999986),
    3: (2, 0.1982167352537725),
    4: (3, 0.19531249999999997),
    5: (4, 0.40169477119999963),
    6: (5, 0.3932348557977291),
}


@pytest.mark.parametrize("n", sorted(FROZEN_P_STAR))
def test_success_at_tstar_frozen(n):
    t_star, p_star = success_at_tstar(n)
    assert (t_star, p_star) == (FROZEN_P_STAR[n][0], pytest.approx(FROZEN_P_STAR[n][1], abs=1e-12))


def test_success_at_tstar_n2_spectral():
    g, s = knn_marked(2)
    op = evolution_operator(g, s)
    recon = schur_evolve(op.matrix(), uniform_state(g), 2)[0]
    assert success_at_tstar(2)[1] == pytest.approx(abs(recon) ** 2, abs=1e-10)


def test_success_at_tstar_n20_bound():
    t_star, p_star = success_at_tstar(20)
    assert t_star == 16
    assert p_star >= exact_lower_bound(20)
    assert p_star > 0.45


def test_success_at_tstar_cap():
    with pytest.raises(ResourceLimitError):
        success_at_tstar(10, arc_cap=100)
    report = knn_report(10, arc_cap=100)
    assert report["p_star"] is None and report["t_star"] == knn_closed_form(10).t_star


def test_explicit_deficit_limit():
    assert math.sqrt(1e8) * explicit_deficit(int(1e8)) == pytest.approx(math.sqrt(3), abs=1e-3)
    for n in range(16, 60):
        assert exact_lower_bound(n) >= explicit_lower_bound(n)


def test_exact_deficit_is_order_one_over_n():
    # the exact three-term bound approaches 1/2 faster than 1/sqrt(n)
    scaled = [(0.5 - exact_lower_bound(n)) * n for n in (100, 1000, 10_000)]
    assert max(scaled) / min(scaled) < 1.5


def test_beta_concentration():
    for n in (4, 10, 100):
        p_a, p_inv, res = beta_concentration(n)
        assert p_a == p_inv
        lo, hi = beta_sandwich(n)
        assert lo**2 < p_a < hi**2
        assert res == pytest.approx(1 - 2 * p_a)


@pytest.mark.parametrize("n", [4, 8])
def test_beta_concentration_matches_dense(n):
    g, s = knn_marked(n)
    vals, vecs = discriminant_eigenpairs(g, s)
    bp, _ = beta_vectors(g, s, vals[0], vecs[:, 0])
    a = s.marked[0]
    p_a, p_inv, res = beta_concentration(n)
    assert bp[a] ** 2 == pytest.approx(p_a, abs=1e-12)
    assert bp[g.inverse_index[a]] ** 2 == pytest.approx(p_inv, abs=1e-12)
    others = np.delete(bp, [a, g.inverse_index[a]])
    assert np.sum(others**2) == pytest.approx(res, abs=1e-12)


def test_arccos_bounds_grid():
    x = np.linspace(0, 1, 10_002)[1:-1]
    lo, val, hi = arccos_bounds(x)
    assert np.all(lo <= val) and np.all(val <= hi)


# --- general report --------------------------------------------------------


def test_spectral_report_general_graph():
    g = build_complete_bipartite(2, 4)
    s = single_arc_sign(g, 3)
    rep = spectral_report(g, s)
    assert max(rep.lift_residuals) <= 1e-9
    assert rep.t_star == measurement_time(rep.lam_max)
    assert rep.p_star == pytest.approx(success_probability(g, s, rep.t_star), abs=1e-14)
    data = rep.to_json()
    assert data["lambda_max"] == rep.lam_max and len(data["lifted"]) == len(rep.lifted)


def test_spectral_report_matrix_free_path():
    g, s = knn_marked(4)
    dense = spectral_report(g, s)
    free = spectral_report(g, s, cap=0)
    assert free.p_star == pytest.approx(dense.p_star, abs=1e-12)
    assert max(free.lift_residuals) <= 1e-9
