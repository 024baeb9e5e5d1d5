"""Arc search on graphs with the signed Szegedy (Grover) walk."""

from .exceptions import (
    ArcwalkError,
    DegenerateLiftError,
    InvalidAutomorphismError,
    InvalidEdgeError,
    InvalidParameterError,
    IsolatedVertexError,
    ResourceLimitError,
    ShapeError,
    SignConstraintError,
    UnknownArcError,
)
from .graph import (
    Arc,
    Graph,
    boundary_matrix,
    build_complete_bipartite,
    build_cycle,
    build_path,
    from_edge_list,
    read_edge_list,
    shift_matrix,
)
from .spectral import (
    beta_concentration,
    beta_vectors,
    discriminant,
    discriminant_entry,
    knn_closed_form,
    lift_eigenpair,
    lower_bound_terms,
    measurement_time,
    spectral_report,
    success_at_tstar,
)
from .symmetry import (
    Automorphism,
    arc_action,
    arc_orbits,
    automorphisms,
    check_conjugation,
    check_intertwining,
    orbit_invariance_check,
)
from .walk import (
    SignFunction,
    WalkOperator,
    evolution_entry,
    evolution_operator,
    evolve,
    oracle_matrix,
    probability_trace,
    signed_boundary,
    single_arc_sign,
    success_probability,
    uniform_state,
)

__version__ = "0.1.0"
