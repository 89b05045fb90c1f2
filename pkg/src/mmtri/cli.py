"""Command-line entry point.

Subcommands: bounds, net, triangulate, discretize, growth, fisher-embed,
verify-bg, compare-patterns.  Reports are JSON on stdout (floats printed with
17 significant digits, fixed field order, so identical configurations give
byte-identical output); meshes are OFF files, graphs plain edge lists.

All randomness flows from the single --seed: the four derived streams
(sampling, net order, pair selection, base choice) are the words of
``numpy.random.SeedSequence(seed).generate_state(4)``.

Exit codes: 0 success, 1 validation error, 2 domain/regime error.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import comparison, complexes, discretization, growth, nets, spaces
from ._accel import NUMBA_ENABLED
from .errors import DomainError, ValidationError


# ---------------------------------------------------------------------------
# deterministic JSON

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps_json(obj, indent=0) -> str:
    """Serialize with fixed field order and 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [dumps_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(inner + s for s in items) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 1)}" for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _emit(report: dict, out=None):
    text = dumps_json(report) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument plumbing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _derived_seeds(seed: int):
    state = np.random.SeedSequence(seed).generate_state(4)
    return {"sample": int(state[0]), "net": int(state[1]),
            "pairs": int(state[2]), "bases": int(state[3])}


def _load_space(path):
    return spaces.load_space(path)


def _sampled_net(args):
    space = _load_space(args.space)
    seeds = _derived_seeds(args.seed)
    sample = space.sample(args.samples, seeds["sample"])
    net = nets.build_net(space, sample, args.eps, seeds["net"], strategy=args.strategy)
    pattern = nets.intersection_pattern(space, sample, net)
    return space, sample, net, pattern, seeds


# ---------------------------------------------------------------------------
# subcommands

def _cmd_bounds(args):
    cd = spaces.CurvatureDimensionData(K=args.K, N=args.N, D=args.D, topological_dim=1)
    pb = comparison.compute_packing_bounds(
        cd, args.eps, C_values=tuple(args.C or [1.0]), r=args.r
    )
    report = {
        "K": args.K, "N": args.N, "D": args.D, "eps": args.eps,
        "n1": pb.n1,
        "n2": pb.n2,
        "n3": {_fmt_float(c): v for c, v in pb.n3.items()},
        "net_card_bound": pb.net_card_bound,
        "degree_bound": pb.degree_bound,
        "doubling_C": pb.doubling_constant,
        "small_ball_c": pb.small_ball_constant,
        "domain_limits": {
            "profile_t_max": None if math.isinf(pb.domain_limit) else pb.domain_limit,
            "R": 0.5 * args.D,
            "r": args.r if args.r is not None else args.eps,
        },
    }
    _emit(report, args.out)
    return 0


def _net_report(space, sample, net, pattern, with_distances):
    coords = None
    if not isinstance(space, spaces.PointCloudSpace):
        coords = np.asarray(sample)[net.centers]
    dist = None
    if with_distances:
        dist = nets.center_distances(space, sample, net)
    return {
        "eps": net.eps,
        "strategy": net.strategy,
        "n_centers": len(net.centers),
        "ambient_sample_size": net.ambient_sample_size,
        "centers": net.centers,
        "center_coordinates": coords,
        "separation": None if math.isinf(net.separation) else net.separation,
        "covering": net.covering,
        "pattern_edges": pattern.edges,
        "overlap_counts": pattern.overlap_counts,
        "center_distances": dist,
    }


def _cmd_net(args):
    space, sample, net, pattern, _ = _sampled_net(args)
    _emit(_net_report(space, sample, net, pattern, args.with_distances), args.out)
    return 0


def _cmd_triangulate(args):
    space, sample, net, pattern, _ = _sampled_net(args)
    cx, report = complexes.triangulate(
        space, sample, net, pattern,
        dim_cap=args.dim_cap, thickness_threshold=args.thickness_threshold,
    )
    prefix = Path(args.out_prefix)
    off_file = None
    mesh = space.mesh_coordinates(np.asarray(sample)[net.centers]) if not isinstance(
        space, spaces.PointCloudSpace) else None
    if mesh is not None and cx.count(2):
        off_file = str(prefix) + ".off"
        _write_off(off_file, mesh, cx.simplices[2])
    list_file = str(prefix) + ".simplices.txt"
    _write_simplex_list(list_file, cx)
    counts, edges_ = report.histogram
    payload = {
        "eps": net.eps,
        "dim_cap": args.dim_cap if args.dim_cap is not None else space.cd_data.topological_dim,
        "n_vertices": cx.n_vertices,
        "simplex_counts": {str(d): cx.count(d) for d in sorted(cx.simplices)},
        "min_thickness": report.min_phi,
        "histogram": {"counts": counts, "bin_edges": edges_},
        "min_dihedral": report.min_dihedral,
        "threshold": report.threshold,
        "below_threshold": [
            {"simplex": list(s), "phi": phi} for s, phi in report.below_threshold
        ],
        "off_file": off_file,
        "simplex_list_file": list_file,
    }
    _emit(payload, args.out)
    return 0


def _write_off(path, coords, triangles):
    lines = [
        "OFF",
        f"{len(coords)} {len(triangles)} 0",
    ]
    for row in coords:
        lines.append(" ".join(_fmt_float(float(v)) for v in row))
    for tri in triangles:
        lines.append("3 " + " ".join(str(int(v)) for v in tri))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_simplex_list(path, cx):
    lines = []
    for dim in sorted(cx.simplices):
        for simp in cx.simplices[dim]:
            lines.append(" ".join(str(int(v)) for v in simp))
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_discretize(args):
    space, sample, net, pattern, seeds = _sampled_net(args)
    graph = discretization.build_graph(space, net, pattern, sample)
    discretization.validate_masses(graph)
    geo = discretization.bounded_geometry_check(graph)
    cert = discretization.rough_isometry_certificate(
        space, graph, pair_budget=args.pairs, seed=seeds["pairs"]
    )
    prefix = Path(args.out_prefix)
    edges_file = str(prefix) + ".edges.txt"
    Path(edges_file).write_text(
        "".join(f"{int(a)} {int(b)}\n" for a, b in pattern.edges)
    )
    masses_file = str(prefix) + ".masses.csv"
    Path(masses_file).write_text(
        "index,mass\n"
        + "".join(f"{i},{_fmt_float(m)}\n" for i, m in enumerate(graph.atomic_masses))
    )
    report = {
        "eps": net.eps,
        "n_vertices": graph.n_vertices,
        "n_edges": len(pattern.edges),
        "rho0": geo.rho0,
        "degree_bound": geo.analytic_bound,
        "bounded_geometry_passed": geo.passed,
        "components": graph.n_components,
        "rough_isometry": {
            "a": cert.a,
            "b": cert.b,
            "eps1": cert.eps1,
            "n_pairs": cert.n_pairs,
            "violations": [list(v) for v in cert.violations],
            "restricted_to_component": cert.restricted_to_component,
        },
        "mass_total": float(graph.atomic_masses.sum()),
        "edges_file": edges_file,
        "masses_file": masses_file,
    }
    _emit(report, args.out)
    return 0


def _growth_payload(rep):
    def fit(f):
        if f is None:
            return None
        return {"slope": f.slope, "intercept": f.intercept, "residual_rms": f.residual_rms}

    return {
        "kind": rep.kind,
        "radii": rep.radii,
        "volumes": rep.volumes,
        "polynomial": fit(rep.polynomial),
        "exponential": fit(rep.exponential),
        "classification": rep.classification,
        "exponent": rep.exponent,
        "rate": rep.rate,
        "window": rep.window,
        "non_collapsing": rep.non_collapsing,
        "exp_statistic_standard": rep.exp_statistic_standard,
        "exp_statistic_literal": rep.exp_statistic_literal,
        "warnings": rep.warnings,
    }


def _cmd_growth(args):
    if (args.space is None) == (args.graph is None):
        raise ValidationError("growth needs exactly one of --space or --graph")
    grid = np.linspace(args.rmax / args.grid_points, args.rmax, args.grid_points)
    if args.space is not None:
        space = _load_space(args.space)
        seeds = _derived_seeds(args.seed)
        base = space.base_point()
        rep = growth.growth_profile(
            space, base, grid, budget=args.budget, seed=seeds["sample"],
            r0=args.r0, V0=args.V0, literal_exponential=args.literal_exponential,
        )
    else:
        graph = discretization.DiscretizationGraph.from_edges_file(args.graph)
        rep = growth.growth_profile(
            graph, args.base, grid, r0=args.r0, V0=args.V0,
            literal_exponential=args.literal_exponential,
        )
    _emit(_growth_payload(rep), args.out)
    return 0


def _cmd_fisher_embed(args):
    p = np.array([float(tok) for tok in args.p.split(",")])
    u = spaces.fisher_embed(p, radius=args.radius)
    _emit(
        {
            "p": p,
            "radius": args.radius,
            "embedding": u,
            "sum_of_squares": float(np.sum(u * u)),
        },
        args.out,
    )
    return 0


def _cmd_verify_bg(args):
    space = _load_space(args.space)
    seeds = _derived_seeds(args.seed)
    grid = np.linspace(args.rmax / args.grid_points, args.rmax, args.grid_points)
    budget = None if args.exact else args.budget
    rep = comparison.bishop_gromov_check(
        space, space.base_point(), grid, budget=budget, seed=seeds["sample"], z_tol=args.z_tol
    )
    payload = {
        "method": rep.method,
        "K": space.cd_data.K,
        "N": space.cd_data.N,
        "radii": rep.radii,
        "phi": rep.phi,
        "std_errors": rep.std_errors,
        "increases": [
            {"index": i, "delta": d, "tolerance": t} for i, d, t in rep.increases
        ],
        "violations": [
            {"index": i, "delta": d, "tolerance": t} for i, d, t in rep.violations
        ],
        "passed": rep.passed,
    }
    _emit(payload, args.out)
    return 0


def _cmd_compare_patterns(args):
    pa, da = _load_net_json(args.net_a)
    pb, db = _load_net_json(args.net_b)
    cd = None
    if args.C is not None:
        if args.K is None or args.N is None or args.D is None:
            raise ValidationError("the C audit needs --K --N --D")
        if da is None or db is None:
            raise ValidationError(
                "the C audit needs nets exported with --with-distances"
            )
        cd = spaces.CurvatureDimensionData(K=args.K, N=args.N, D=args.D, topological_dim=1)
    res = nets.compare_patterns(pa, pb, dist_a=da, dist_b=db, cd=cd, C=args.C)
    _emit(
        {
            "identical": res.identical,
            "symmetric_difference": [list(e) for e in res.symmetric_difference],
            "n3": res.n3,
            "checked_pairs": res.checked_pairs,
            "violations": [list(v) for v in res.violations],
        },
        args.out,
    )
    return 0


def _load_net_json(path):
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read net file {path}: {exc}") from exc
    for key in ("eps", "n_centers", "pattern_edges"):
        if key not in payload:
            raise ValidationError(f"{path}: missing field {key!r}")
    edges = np.asarray(payload["pattern_edges"], dtype=np.int64).reshape(-1, 2)
    counts = np.ones(payload["n_centers"], dtype=np.int64)
    if len(edges):
        np.add.at(counts, edges[:, 0], 1)
        np.add.at(counts, edges[:, 1], 1)
    pattern = nets.IntersectionPattern(
        eps=float(payload["eps"]),
        n_vertices=int(payload["n_centers"]),
        edges=edges,
        overlap_counts=counts,
    )
    dist = payload.get("center_distances")
    return pattern, None if dist is None else np.asarray(dist, dtype=np.float64)


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mmtri", description=__doc__)
    parser.add_argument("--threads", type=int, default=None,
                        help="cap the numba thread pool (results are thread-count independent)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="packing/overlap/degree bounds for declared (K, N, D)")
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--C", type=float, action="append")
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bounds)

    def add_net_args(q):
        q.add_argument("--space", required=True, help="space spec JSON")
        q.add_argument("--eps", type=float, required=True)
        q.add_argument("--samples", type=int, required=True)
        q.add_argument("--seed", type=int, required=True)
        q.add_argument("--strategy", choices=("random", "farthest"), default="random")
        q.add_argument("--out", default=None)

    p = sub.add_parser("net", help="greedy maximal eps-separated net with certificates")
    add_net_args(p)
    p.add_argument("--with-distances", action="store_true",
                   help="include the full center-distance matrix (needed by compare-patterns)")
    p.set_defaults(func=_cmd_net)

    p = sub.add_parser("triangulate", help="flag complex with thickness report")
    add_net_args(p)
    p.add_argument("--dim-cap", type=int, default=None)
    p.add_argument("--thickness-threshold", type=float, default=0.0)
    p.add_argument("--out-prefix", default="triangulation")
    p.set_defaults(func=_cmd_triangulate)

    p = sub.add_parser("discretize", help="discretization graph, cells, rough isometry")
    add_net_args(p)
    p.add_argument("--pairs", type=int, default=2000,
                   help="pair budget for the rough-isometry certificate")
    p.add_argument("--out-prefix", default="discretization")
    p.set_defaults(func=_cmd_discretize)

    p = sub.add_parser("growth", help="volume-growth classification")
    p.add_argument("--space", default=None)
    p.add_argument("--graph", default=None, help="edge list file ('i j' per line)")
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--grid-points", type=int, default=16)
    p.add_argument("--budget", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--base", type=int, default=0, help="base vertex for --graph")
    p.add_argument("--r0", type=float, default=None)
    p.add_argument("--V0", type=float, default=None)
    p.add_argument("--literal-exponential", action="store_true",
                   help="also report the literal V/r statistic")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_growth)

    p = sub.add_parser("fisher-embed", help="square-root embedding of a probability vector")
    p.add_argument("--p", required=True, help="comma-separated probabilities")
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fisher_embed)

    p = sub.add_parser("verify-bg", help="monotonicity check of the comparison quotient")
    p.add_argument("--space", required=True)
    p.add_argument("--rmax", type=float, required=True)
    p.add_argument("--grid-points", type=int, default=16)
    p.add_argument("--budget", type=int, default=100000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="closed-form ball volumes")
    p.add_argument("--z-tol", type=float, default=3.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify_bg)

    p = sub.add_parser("compare-patterns", help="labeled comparison of two net patterns")
    p.add_argument("--net-a", required=True)
    p.add_argument("--net-b", required=True)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--K", type=float, default=None)
    p.add_argument("--N", type=float, default=None)
    p.add_argument("--D", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_compare_patterns)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is not None and NUMBA_ENABLED:
            import numba

            numba.set_num_threads(max(1, min(args.threads, numba.config.NUMBA_NUM_THREADS)))
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
