"""Command-line driver: ``arcwalk {simulate,spectrum,knn-sweep,orbits,verify}``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource
limit or I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

from . import report
from .exceptions import ArcwalkError, ResourceLimitError, UnknownArcError
from .graph import Graph, build_complete_bipartite, build_cycle, build_path, dense_cap, read_edge_list
from .spectral import knn_report, spectral_report
from .symmetry import automorphisms, orbit_invariance_check, orbit_report
from .walk import probability_trace, single_arc_sign

log = logging.getLogger("arcwalk")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> range:
    """``"2..30"`` -> ``range(2, 31)``; a single integer is a one-element range."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return range(lo, hi + 1)


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--path", type=int, metavar="N", help="path graph P_N")
    src.add_argument("--cycle", type=int, metavar="N", help="cycle graph C_N")
    src.add_argument("--kbipartite", type=int, nargs=2, metavar=("M", "N"), help="complete bipartite K_{M,N}")
    src.add_argument("--edges", metavar="FILE", help="edge-list file")


def _add_output_args(p: argparse.ArgumentParser, default_format: str) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("-o", "--output", default=None, help="output file (default stdout)")


def load_graph(args) -> Graph:
    if args.path is not None:
        return build_path(args.path)
    if args.cycle is not None:
        return build_cycle(args.cycle)
    if args.kbipartite is not None:
        return build_complete_bipartite(*args.kbipartite)
    return read_edge_list(args.edges)


def resolve_arc(graph: Graph, spec: str) -> int:
    """Canonical arc index from ``"k"`` or ``"o,t"`` (vertex labels)."""
    try:
        if "," in spec:
            o, t = (int(v) for v in spec.split(","))
            if graph.labels is not None:
                lookup = {lab: i for i, lab in enumerate(graph.labels)}
                if o not in lookup or t not in lookup:
                    raise UnknownArcError(f"({o},{t}) is not an arc of this graph")
                o, t = lookup[o], lookup[t]
            return graph.arc_index((o, t))
        return graph.arc_index(int(spec))
    except ValueError:
        raise UsageError(f"cannot parse arc {spec!r}; use an index or o,t") from None


def cmd_simulate(args) -> int:
    g = load_graph(args)
    s = single_arc_sign(g, resolve_arc(g, args.mark))
    trace = probability_trace(g, s, args.tau_max, cap=args.dense_cap)
    if args.format == "csv":
        text = report.to_csv(trace.rows(), report.TRACE_COLUMNS)
    else:
        text = report.to_json(trace.to_json()) + "\n"
    report.emit_report(text, args.output)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g = load_graph(args)
    s = single_arc_sign(g, resolve_arc(g, args.mark))
    rep = spectral_report(g, s, cap=args.dense_cap)
    data = rep.to_json()
    if args.format == "json":
        text = report.to_json(data) + "\n"
    else:
        rows = [{"lambda": p["lambda"], "theta": p["theta"], "residual": p["residual"]} for p in data["lifted"]]
        text = report.to_csv(rows, ("lambda", "theta", "residual"))
    report.emit_report(text, args.output)
    return EXIT_OK


def cmd_knn_sweep(args) -> int:
    ns = list(args.n)
    if ns[0] < 2:
        raise UsageError("K_{n,n} sweeps need n >= 2")
    cap = dense_cap(args.dense_cap)

    def cell(n):
        return knn_report(n, simulate=not args.no_simulate, arc_cap=cap)

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        reports = list(pool.map(cell, ns))
    skipped = [r["n"] for r in reports if r["p_star"] is None and not args.no_simulate]
    if skipped:
        log.warning("p* not simulated above the dense cap %d for n = %s", cap, skipped)
    if args.format == "csv":
        text = report.to_csv([report.flatten_knn_row(r) for r in reports], report.SWEEP_COLUMNS)
    elif len(reports) == 1:
        text = report.to_json(reports[0]) + "\n"
    else:
        text = report.to_json({"reports": reports}) + "\n"
    report.emit_report(text, args.output)
    return EXIT_OK


def cmd_orbits(args) -> int:
    g = load_graph(args)
    autos = automorphisms(g, vertex_cap=args.vertex_cap)
    if args.format == "json":
        text = report.to_json(orbit_report(g, autos)) + "\n"
    else:
        inv = orbit_invariance_check(g, args.tau_max, autos=autos)
        for i, j in inv.coincident_orbits():
            log.info("orbits %d and %d have identical traces (converse candidate)", i, j)
        text = report.to_csv(inv.rows(), report.INVARIANCE_COLUMNS)
    report.emit_report(text, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all(seed=args.seed)
    lines = [r.line() for r in results]
    failed = [r for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    report.emit_report("\n".join(lines) + "\n", args.output)
    return EXIT_FAIL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arcwalk", description=__doc__.splitlines()[0])
    parser.add_argument("--dense-cap", type=int, default=None,
                        help="max arcs for dense operators (default $ARCWALK_DENSE_CAP or 4096)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="success-probability trace for one marked arc")
    _add_graph_args(p)
    p.add_argument("--mark", required=True, help="marked arc: canonical index or o,t")
    p.add_argument("--tau-max", type=int, default=50)
    _add_output_args(p, "csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="discriminant spectrum, lifted eigenpairs, t* and p*")
    _add_graph_args(p)
    p.add_argument("--mark", required=True)
    _add_output_args(p, "json")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("knn-sweep", help="K_{n,n} closed forms and simulated p* over a range of n")
    p.add_argument("--n", type=parse_range, required=True, metavar="A..B")
    p.add_argument("--no-simulate", action="store_true", help="closed forms only")
    p.add_argument("--workers", type=int, default=1)
    _add_output_args(p, "csv")
    p.set_defaults(func=cmd_knn_sweep)

    p = sub.add_parser("orbits", help="arc orbits (json) or per-orbit invariance traces (csv)")
    _add_graph_args(p)
    p.add_argument("--tau-max", type=int, default=50)
    p.add_argument("--vertex-cap", type=int, default=10)
    _add_output_args(p, "json")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("verify", help="run the full theorem-reproduction suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    if getattr(args, "tau_max", 0) < 0:
        parser.error("--tau-max must be non-negative")
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"arcwalk: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"arcwalk: I/O error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ArcwalkError) as exc:
        print(f"arcwalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
