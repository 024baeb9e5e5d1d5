"""Numerical reproduction of the closed-form results, one check per claim.

Each ``check_*`` function returns a :class:`CheckResult`; :func:`run_all`
runs them in order.  Both the ``verify`` CLI command and the acceptance
tests go through here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import Graph, build_complete_bipartite, build_cycle, build_path, from_edge_list
from .spectral import (
    arccos_bounds,
    beta_concentration,
    beta_sandwich,
    discriminant,
    exact_lower_bound,
    explicit_deficit,
    explicit_lower_bound,
    knn_closed_form,
    knn_marked,
    schur_evolve,
    success_at_tstar,
)
from .symmetry import (
    Automorphism,
    automorphisms,
    conjugation_sweep,
    orbit_invariance_check,
)
from .walk import (
    WalkOperator,
    amplitude_trace,
    entrywise_matrix,
    evolve,
    single_arc_sign,
    uniform_state,
)


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key} {self.title}: {self.detail}"


def random_connected_graph(rng: np.random.Generator, max_vertices: int = 10) -> Graph:
    """Random spanning tree plus random extra edges on 2..max_vertices vertices."""
    n = int(rng.integers(2, max_vertices + 1))
    edges = {(int(rng.integers(0, v)), v) for v in range(1, n)}
    density = rng.uniform(0.0, 0.7)
    for x in range(n):
        for y in range(x + 1, n):
            if rng.random() < density:
                edges.add((x, y))
    return from_edge_list(sorted(edges), n_vertices=n, name=f"random{n}")


def _flat_probability(family: str, sizes, target: Callable[[int], float], tau_max: int = 100) -> CheckResult:
    builder = build_cycle if family == "cycle" else build_path
    worst, worst_amp = 0.0, 0.0
    for n in sizes:
        g = builder(n)
        for a in range(g.n_arcs):
            op = WalkOperator(g, single_arc_sign(g, a))
            amps = amplitude_trace(op, tau_max)
            probs = np.abs(amps[:, a]) ** 2
            worst = max(worst, float(np.max(np.abs(probs - target(n)))))
            worst_amp = max(worst_amp, float(np.max(np.abs(np.abs(amps) - 1 / math.sqrt(g.n_arcs)))))
    ok = worst <= 1e-10
    name = "C_n" if family == "cycle" else "P_n"
    return CheckResult(
        "", f"flat probability on {name}", ok,
        f"max |p - target| = {worst:.3e} (tol 1e-10); max ||amp| - 1/sqrt|A|| = {worst_amp:.3e}",
        {"max_deviation": worst, "max_amplitude_deviation": worst_amp},
    )


def check_cycle_flat(seed: int = 0) -> CheckResult:
    r = _flat_probability("cycle", range(3, 13), lambda n: 1 / (2 * n))
    r.key = "AC1"
    return r


def check_path_flat(seed: int = 0) -> CheckResult:
    r = _flat_probability("path", range(2, 13), lambda n: 1 / (2 * n - 2))
    r.key = "AC2"
    return r


def check_unitarity(seed: int = 0, n_graphs: int = 200) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_u, worst_e = 0.0, 0.0
    for _ in range(n_graphs):
        g = random_connected_graph(rng)
        s = single_arc_sign(g, int(rng.integers(0, g.n_arcs)))
        u = WalkOperator(g, s).matrix()
        worst_u = max(worst_u, float(np.max(np.abs(u @ u.T - np.eye(g.n_arcs)))))
        worst_e = max(worst_e, float(np.max(np.abs(entrywise_matrix(g, s) - u))))
    ok = worst_u <= 1e-12 and worst_e <= 1e-14
    return CheckResult(
        "AC3", "unitarity and entrywise construction", ok,
        f"{n_graphs} random graphs (seed {seed}): max|UU*-I| = {worst_u:.3e} (tol 1e-12), "
        f"max|entrywise - S(2d*d-I)| = {worst_e:.3e} (tol 1e-14)",
        {"unitarity": worst_u, "entrywise": worst_e},
    )


def knn_generators(n: int) -> list[Automorphism]:
    """Transposition and n-cycle on each part, plus the part swap."""
    def perm(mapping):
        base = list(range(2 * n))
        for k, v in mapping.items():
            base[k] = v
        return Automorphism(tuple(base))

    gens = []
    for off in (0, n):
        gens.append(perm({off: off + 1, off + 1: off}))
        gens.append(perm({off + i: off + (i + 1) % n for i in range(n)}))
    gens.append(perm({i: (i + n) % (2 * n) for i in range(2 * n)}))
    return gens


def _random_words(gens: list[Automorphism], n_vertices: int, count: int, length: int, rng) -> list[Automorphism]:
    out = []
    for _ in range(count):
        g = Automorphism.identity(n_vertices)
        for k in rng.integers(0, len(gens), size=length):
            g = gens[int(k)].compose(g)
        out.append(g)
    return out


def check_conjugation(seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    graphs = [build_path(n) for n in range(2, 7)]
    graphs += [build_cycle(n) for n in range(3, 7)]
    graphs += [build_complete_bipartite(n, n) for n in range(1, 7)]
    graphs.append(build_complete_bipartite(1, 3))
    worst, notes, total = 0.0, [], 0
    for g in graphs:
        if g.n_vertices <= 10:
            autos = automorphisms(g)
        else:
            # beyond the enumeration cap: generators plus random products
            n = g.n_vertices // 2
            gens = knn_generators(n)
            autos = gens + _random_words(gens, g.n_vertices, 300, 25, rng)
            notes.append(f"{g.name}: {len(gens)} generators + 300 random products")
        total += len(autos)
        worst = max(worst, conjugation_sweep(g, autos))
    ok = worst <= 1e-12
    detail = f"{total} automorphisms over {len(graphs)} graphs, every arc: max residual {worst:.3e} (tol 1e-12)"
    if notes:
        detail += "; " + "; ".join(notes)
    return CheckResult("AC4", "conjugation theorem", ok, detail, {"max_residual": worst})


def check_orbit_invariance(seed: int = 0, tau_max: int = 100) -> CheckResult:
    parts, ok, measured = [], True, {}
    k33 = orbit_invariance_check(build_complete_bipartite(3, 3), tau_max)
    amp_dev = float(np.max(np.abs(k33.amplitudes - k33.amplitudes[:, :1])))
    good = k33.partition.arc_transitive and amp_dev <= 1e-10
    ok &= good
    measured["K3,3"] = amp_dev
    parts.append(f"K3,3 arc-transitive={k33.partition.arc_transitive}, 18-trace amplitude spread {amp_dev:.3e}")
    for n in (4, 5):
        rep = orbit_invariance_check(build_path(n), tau_max)
        dev = max(rep.max_amplitude_deviation, rep.max_probability_deviation)
        ok &= dev <= 1e-10
        measured[f"P{n}"] = dev
        parts.append(f"P{n}: {len(rep.partition)} orbits, in-orbit spread {dev:.3e}")
    return CheckResult("AC5", "orbit invariance", ok, "; ".join(parts) + " (tol 1e-10)", measured)


def check_knn_spectrum(seed: int = 0) -> CheckResult:
    worst = 0.0
    for n in range(2, 31):
        g, s = knn_marked(n)
        numeric = np.sort(np.linalg.eigvalsh(discriminant(g, s)))
        cf = knn_closed_form(n)
        expected = np.sort(np.array([cf.lam, -cf.lam, cf.mu, -cf.mu] + [0.0] * (2 * n - 4)))
        worst = max(worst, float(np.max(np.abs(numeric - expected))))
    ok = worst <= 1e-9
    return CheckResult(
        "AC6", "K_{n,n} discriminant spectrum", ok,
        f"n = 2..30: max |numeric - closed form| = {worst:.3e} with multiplicities (tol 1e-9)",
        {"max_deviation": worst},
    )


def check_measurement_time(seed: int = 0) -> CheckResult:
    bad, ratios = [], []
    for n in range(2, 201):
        cf = knn_closed_form(n)
        if not cf.t_star_lower <= cf.t_star <= cf.t_star_upper:
            bad.append(n)
        if n >= 64:
            ratio = cf.t_star / n
            ratios.append(ratio)
            if not math.pi / 4 - 0.15 <= ratio <= math.pi / 4 + 0.05:
                bad.append(n)
    ok = not bad
    return CheckResult(
        "AC7", "measurement-time sandwich", ok,
        f"n = 2..200 inside the bounds; t*/n for n >= 64 in [{min(ratios):.4f}, {max(ratios):.4f}] "
        f"vs [{math.pi / 4 - 0.15:.4f}, {math.pi / 4 + 0.05:.4f}]" + (f"; failures at {bad}" if bad else ""),
        {"ratio_min": min(ratios), "ratio_max": max(ratios)},
    )


def check_lower_bound(seed: int = 0) -> CheckResult:
    bad, slack = [], []
    for n in range(4, 31):
        _, p_star = success_at_tstar(n)
        bound = exact_lower_bound(n)
        slack.append(p_star - bound)
        if p_star < bound:
            bad.append(f"p*({n}) = {p_star:.6f} < {bound:.6f}")
    scaled = []
    for n in range(16, 31):
        explicit = explicit_lower_bound(n)
        if exact_lower_bound(n) < explicit:
            bad.append(f"exact bound below explicit bound at n={n}")
        s = (0.5 - explicit) * math.sqrt(n)
        scaled.append(s)
        if not 1.0 <= s <= 3.0:
            bad.append(f"scaled deficit {s:.4f} at n={n}")
    ok = not bad
    return CheckResult(
        "AC8", "success-probability lower bound", ok,
        f"n = 4..30: min(p* - bound) = {min(slack):.4f}; n = 16..30: sqrt(n)(1/2 - bound) in "
        f"[{min(scaled):.4f}, {max(scaled):.4f}] (window [1, 3]); sqrt(30) g(30) = "
        f"{math.sqrt(30) * explicit_deficit(30):.4f}" + (f"; {'; '.join(bad)}" if bad else ""),
        {"min_slack": min(slack), "scaled_min": min(scaled), "scaled_max": max(scaled)},
    )


def check_beta_concentration(seed: int = 0) -> CheckResult:
    bad, residuals = [], []
    for n in range(4, 101):
        p_a, p_inv, residual = beta_concentration(n)
        lo, hi = beta_sandwich(n)
        if p_a != p_inv:
            bad.append(f"asymmetric at n={n}")
        if not lo * lo < p_a < hi * hi:
            bad.append(f"outside sandwich at n={n}")
        residuals.append(residual)
    diffs = np.diff(residuals)
    if not (np.all(diffs < 0) and residuals[-1] >= 0):
        bad.append("residual not decreasing toward 0")
    ok = not bad
    return CheckResult(
        "AC9", "beta_+ concentration", ok,
        f"n = 4..100: residual {residuals[0]:.4f} -> {residuals[-1]:.4f}, strictly decreasing"
        + (f"; {'; '.join(bad)}" if bad else ""),
        {"residual_first": residuals[0], "residual_last": residuals[-1]},
    )


def check_spectral_vs_simulation(seed: int = 0) -> CheckResult:
    worst = 0.0
    for n in range(2, 13):
        g, s = knn_marked(n)
        op = WalkOperator(g, s)
        t_star = knn_closed_form(n).t_star
        a = s.marked[0]
        j = uniform_state(g)
        simulated = evolve(op, j, t_star)[a]
        reconstructed = schur_evolve(op.matrix(), j, t_star)[a]
        worst = max(worst, abs(simulated - reconstructed))
    ok = worst <= 1e-10
    return CheckResult(
        "AC10", "spectral reconstruction vs simulation", ok,
        f"n = 2..12: max |(U^t* j)_a simulated - reconstructed| = {worst:.3e} (tol 1e-10)",
        {"max_deviation": float(worst)},
    )


def check_arccos_bounds(seed: int = 0, points: int = 10_000) -> CheckResult:
    x = np.arange(1, points + 1) / (points + 1)
    lower, value, upper = arccos_bounds(x)
    ok = bool(np.all(lower <= value) and np.all(value <= upper))
    return CheckResult(
        "AC11", "arccos bounds", ok,
        f"{points} grid points in (0,1): min gaps {np.min(value - lower):.3e}, {np.min(upper - value):.3e}",
        {"min_lower_gap": float(np.min(value - lower)), "min_upper_gap": float(np.min(upper - value))},
    )


CHECKS: list[Callable[..., CheckResult]] = [
    check_cycle_flat,
    check_path_flat,
    check_unitarity,
    check_conjugation,
    check_orbit_invariance,
    check_knn_spectrum,
    check_measurement_time,
    check_lower_bound,
    check_beta_concentration,
    check_spectral_vs_simulation,
    check_arccos_bounds,
]


def run_all(seed: int = 0) -> list[CheckResult]:
    return [check(seed=seed) for check in CHECKS]
