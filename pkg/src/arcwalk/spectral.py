"""Discriminant spectra, eigenvector lifting and the K_{n,n} closed forms.

The walk's nontrivial spectrum is read off the small vertex-space
discriminant ``T = d_s S d_s^*``: each eigenvalue ``lam`` of ``T`` with
``|lam| < 1`` gives the pair ``exp(+-i arccos lam)`` of the walk, with
eigenvectors built from the eigenvector ``f`` of ``T``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .exceptions import DegenerateLiftError, InvalidParameterError, ResourceLimitError
from .graph import Graph, build_complete_bipartite, dense_cap
from .walk import SignFunction, WalkOperator, evolve, signed_boundary, single_arc_sign, uniform_state

LIFT_GUARD = 1e-12
# floor() snaps to an integer when pi/(2 theta) lands this close to it.
FLOOR_SNAP = 1e-9


def discriminant(graph: Graph, sign: SignFunction) -> np.ndarray:
    """``d_s S d_s^*`` as a real symmetric ``|V| x |V|`` matrix."""
    ds = signed_boundary(graph, sign)
    # S d_s^* permutes the rows of d_s^* by arc inversion
    return ds @ ds.T[graph.inverse_index, :]


def discriminant_entry(graph: Graph, sign: SignFunction, x: int, y: int) -> float:
    if x == y or not graph.has_edge(x, y):
        return 0.0
    return sign((x, y)) * sign((y, x)) / math.sqrt(graph.degree[x] * graph.degree[y])


def _fix_sign(f: np.ndarray, graph: Graph, sign: SignFunction) -> np.ndarray:
    # entries off the marked arcs' endpoints positive; fall back to the first
    # entry of largest modulus
    touched = set()
    for arc in sign.marked_arcs:
        touched.update(arc)
    rest = [v for v in range(graph.n_vertices) if v not in touched]
    total = float(np.sum(f[rest])) if rest else 0.0
    if abs(total) > 1e-12:
        return f if total > 0 else -f
    pivot = f[int(np.argmax(np.abs(f)))]
    return f if pivot >= 0 else -f


def discriminant_eigenpairs(graph: Graph, sign: SignFunction) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues in descending order and matching unit eigenvectors (columns)."""
    t = discriminant(graph, sign)
    vals, vecs = np.linalg.eigh(t)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    for k in range(vecs.shape[1]):
        vecs[:, k] = _fix_sign(vecs[:, k], graph, sign)
    return vals, vecs


def _theta(lam: float) -> float:
    if abs(lam) >= 1.0 - LIFT_GUARD:
        raise DegenerateLiftError(f"|lambda| = {abs(lam):.17g} is within {LIFT_GUARD} of 1")
    return math.acos(min(1.0, max(-1.0, lam)))


@dataclass(frozen=True)
class LiftedPair:
    lam: float
    theta: float
    eigenvalues: tuple[complex, complex]
    phi_plus: np.ndarray
    phi_minus: np.ndarray


def lift_eigenpair(graph: Graph, sign: SignFunction, lam: float, f: np.ndarray) -> LiftedPair:
    """Walk eigenvectors for ``exp(+i theta)`` and ``exp(-i theta)``, ``theta = arccos lam``."""
    theta = _theta(lam)
    ds = signed_boundary(graph, sign)
    a = ds.T @ f
    sa = a[graph.inverse_index]
    scale = 1.0 / (math.sqrt(2.0) * abs(math.sin(theta)))
    plus, minus = np.exp(1j * theta), np.exp(-1j * theta)
    return LiftedPair(
        lam=float(lam),
        theta=theta,
        eigenvalues=(complex(plus), complex(minus)),
        phi_plus=scale * (a - plus * sa),
        phi_minus=scale * (a - minus * sa),
    )


def beta_vectors(graph: Graph, sign: SignFunction, lam: float, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``beta_+ = (phi_+ + phi_-)/sqrt2`` (real) and ``beta_- = (phi_+ - phi_-)/sqrt2``."""
    pair = lift_eigenpair(graph, sign, lam, f)
    bp = (pair.phi_plus + pair.phi_minus) / math.sqrt(2.0)
    bm = (pair.phi_plus - pair.phi_minus) / math.sqrt(2.0)
    return bp.real.copy(), bm


def measurement_time(lam: float) -> int:
    """``floor(pi / (2 arccos lam))``."""
    theta = _theta(lam)
    x = math.pi / (2.0 * theta)
    nearest = round(x)
    if abs(x - nearest) <= FLOOR_SNAP * max(1.0, x):
        return int(nearest)
    return int(math.floor(x))


def arccos_bounds(x):
    """Lower bound, ``1/arccos x`` and upper bound on ``(0, 1)``."""
    x = np.asarray(x, dtype=float)
    upper = 1.0 / np.sqrt(2.0 * (1.0 - x))
    return upper - 1.0, 1.0 / np.arccos(x), upper


# --- K_{n,n} ---------------------------------------------------------------


@dataclass(frozen=True)
class KnnClosedForm:
    n: int
    delta: float
    lam: float
    mu: float
    theta: float
    f_marked: float
    f_other: float
    beta_plus_a: float
    t_star: int
    t_star_lower: float
    t_star_upper: float
    term_beta: float
    term_mid_bound: float
    term_tail: float

    def as_dict(self) -> dict:
        return asdict(self)


def _knn_parts(n: int):
    if n < 2:
        raise InvalidParameterError(f"K_(n,n) closed forms need n >= 2, got {n}")
    delta = float(n * n + 4 * n - 4)
    r = math.sqrt(delta)
    return delta, r


def knn_closed_form(n: int) -> KnnClosedForm:
    delta, r = _knn_parts(n)
    lam = (n - 2 + r) / (2 * n)
    mu = (-(n - 2) + r) / (2 * n)
    norm = 1.0 / math.sqrt(delta - n * r)
    beta_a = (n - r) * (3 * n - 2 + r) / (
        2 * math.sqrt(2 * n) * math.sqrt(delta - n * r) * math.sqrt(n * n - (n - 2) * r)
    )
    beta, mid, tail = lower_bound_terms(n)
    return KnnClosedForm(
        n=n,
        delta=delta,
        lam=lam,
        mu=mu,
        theta=math.acos(lam),
        f_marked=norm * (-n + r) / 2,
        f_other=norm,
        beta_plus_a=beta_a,
        t_star=measurement_time(lam),
        t_star_lower=(math.pi / 2) * (math.sqrt(n * (2 * n + 3) / 8) - 2),
        t_star_upper=(math.pi / 4) * math.sqrt(n * (n + 2)),
        term_beta=beta,
        term_mid_bound=mid,
        term_tail=tail,
    )


def lower_bound_terms(n: int) -> tuple[float, float, float]:
    """``|(beta_+)_a|``, the bound on ``||U^t*(i beta_-) + beta_+||`` and ``||j - i beta_-||``.

    ``sqrt(p*)`` is at least the first minus the other two.
    """
    delta, r = _knn_parts(n)
    beta = abs(
        (n - r) * (3 * n - 2 + r) / (2 * math.sqrt(2 * n) * math.sqrt(delta - n * r) * math.sqrt(n * n - (n - 2) * r))
    )
    mid = math.sqrt((n + 2 - r) / n)
    tail_sq = 2 - math.sqrt(2) * (n - 1) * (r + n) / (n * math.sqrt(n) * math.sqrt(delta - n * r))
    return beta, mid, math.sqrt(max(tail_sq, 0.0))


def exact_lower_bound(n: int) -> float:
    beta, mid, tail = lower_bound_terms(n)
    return max(0.0, beta - mid - tail) ** 2


def explicit_deficit(n: int) -> float:
    """Elementary bound ``g(n)`` with ``sqrt(p*) >= 1/sqrt2 - g(n)``; ``sqrt(n) g(n) -> sqrt3``."""
    s2 = math.sqrt(2.0)
    return (
        (13 * s2 * n - s2) / (8 * n * (n + 2))
        + math.sqrt(8 / (n * (2 * n + 3)))
        + math.sqrt((3 * n * n + 2 * n + 1) / (n * n * (n + 2)))
    )


def explicit_lower_bound(n: int) -> float:
    return max(0.0, 1 / math.sqrt(2.0) - explicit_deficit(n)) ** 2


def beta_sandwich(n: int) -> tuple[float, float]:
    """Elementary lower and upper bounds on ``|(beta_+)_a|`` (valid for large n)."""
    lower = (n - 1) * (4 * n - 1) / (4 * math.sqrt(2) * n * (n + 2))
    upper = math.sqrt(2 * n * n + 6 * n - 4) / (2 * n + 1)
    return lower, upper


def beta_concentration(n: int) -> tuple[float, float, float]:
    """``|(beta_+)_a|^2``, ``|(beta_+)_{a^-1}|^2`` and the mass left on every other arc."""
    b = knn_closed_form(n).beta_plus_a
    # (beta_+)_{a^-1} = -(beta_+)_a
    p_a, p_inv = b * b, (-b) * (-b)
    return p_a, p_inv, 1.0 - p_a - p_inv


def knn_marked(n: int) -> tuple[Graph, SignFunction]:
    """K_{n,n} with its first canonical arc ``(0, n)`` marked."""
    g = build_complete_bipartite(n, n)
    return g, single_arc_sign(g, (0, n))


def success_at_tstar(n: int, arc_cap: int | None = None) -> tuple[int, float]:
    """Simulate K_{n,n} for ``t*`` steps and return ``(t*, p*)``."""
    cap = dense_cap(arc_cap)
    if 2 * n * n > cap:
        raise ResourceLimitError(f"K_({n},{n}) has {2 * n * n} arcs, above the cap {cap}")
    g, s = knn_marked(n)
    t_star = knn_closed_form(n).t_star
    op = WalkOperator(g, s, cap=cap)
    psi = evolve(op, uniform_state(g), t_star)
    a = s.marked[0]
    return t_star, float(abs(psi[a]) ** 2)


def knn_report(n: int, simulate: bool = True, arc_cap: int | None = None) -> dict:
    """Closed forms for K_{n,n}, plus the simulated ``p*`` when within the arc cap."""
    cf = knn_closed_form(n)
    p_a, p_inv, residual = beta_concentration(n)
    p_star = None
    if simulate:
        try:
            p_star = success_at_tstar(n, arc_cap)[1]
        except ResourceLimitError:
            p_star = None
    return {
        "n": n,
        "delta": cf.delta,
        "lambda": cf.lam,
        "mu": cf.mu,
        "theta": cf.theta,
        "t_star": cf.t_star,
        "t_star_lower": cf.t_star_lower,
        "t_star_upper": cf.t_star_upper,
        "p_star": p_star,
        "term_beta": cf.term_beta,
        "term_mid_bound": cf.term_mid_bound,
        "term_tail": cf.term_tail,
        "beta_concentration": {"p_a": p_a, "p_a_inv": p_inv, "residual": residual},
    }


# --- general graphs -------------------------------------------------------


def schur_evolve(matrix: np.ndarray, state: np.ndarray, steps: int) -> np.ndarray:
    """``matrix^steps @ state`` through a complex Schur factorisation.

    For a unitary matrix the Schur form is diagonal up to rounding, so this
    is a spectral reconstruction independent of step-by-step application.
    """
    tri, q = scipy.linalg.schur(np.asarray(matrix, dtype=complex), output="complex")
    eig = np.diag(tri)
    return q @ (eig**steps * (q.conj().T @ state))


@dataclass
class SpectralReport:
    graph: Graph
    sign: SignFunction
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    lifted: list[LiftedPair]
    lift_residuals: list[float]
    theta: float | None
    t_star: int | None
    p_star: float | None

    @property
    def lam_max(self) -> float:
        return float(self.eigenvalues[0])

    def to_json(self) -> dict:
        g = self.graph
        return {
            "graph": g.descriptor(),
            "marked_arc": [[g.label_of(a.origin), g.label_of(a.terminus)] for a in self.sign.marked_arcs],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "lambda_max": self.lam_max,
            "theta": self.theta,
            "t_star": self.t_star,
            "p_star": self.p_star,
            "lifted": [
                {"lambda": p.lam, "theta": p.theta, "residual": r}
                for p, r in zip(self.lifted, self.lift_residuals)
            ],
            "max_lift_residual": max(self.lift_residuals, default=0.0),
        }


def spectral_report(graph: Graph, sign: SignFunction, cap: int | None = None) -> SpectralReport:
    vals, vecs = discriminant_eigenpairs(graph, sign)
    op = WalkOperator(graph, sign, cap=cap)
    lifted, residuals = [], []
    for k, lam in enumerate(vals):
        if abs(lam) >= 1.0 - LIFT_GUARD:
            continue
        pair = lift_eigenpair(graph, sign, float(lam), vecs[:, k])
        res = max(
            float(np.linalg.norm(op.apply(pair.phi_plus) - pair.eigenvalues[0] * pair.phi_plus)),
            float(np.linalg.norm(op.apply(pair.phi_minus) - pair.eigenvalues[1] * pair.phi_minus)),
        )
        lifted.append(pair)
        residuals.append(res)
    theta = t_star = p_star = None
    lam_max = float(vals[0])
    if abs(lam_max) < 1.0 - LIFT_GUARD:
        theta = _theta(lam_max)
        t_star = measurement_time(lam_max)
        psi = evolve(op, uniform_state(graph), t_star)
        p_star = float(np.sum(np.abs(psi[list(sign.marked)]) ** 2))
    return SpectralReport(graph, sign, vals, vecs, lifted, residuals, theta, t_star, p_star)
