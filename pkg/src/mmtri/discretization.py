"""Discretization graph of a net: combinatorial metric on the pattern's
1-skeleton, Dirichlet (nearest-center) cells with atomic masses, bounded
geometry, and the rough-isometry certificate between the space metric and
the hop metric.

The hop metric always dominates: any two centers joined by a graph path of
length h are at space distance < 2*eps*h, so d <= 2*eps*hop holds for every
pair in a connected component, with no curvature assumption.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .comparison import bound_degree
from .errors import ValidationError


@dataclass
class DiscretizationGraph:
    """Net centers with pattern edges, CSR adjacency, Dirichlet cells and
    atomic masses (cell measures)."""

    space: object
    sample: object
    net: object
    pattern: object
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray
    component_labels: np.ndarray
    voronoi_assignment: np.ndarray  # sample point -> center position
    voronoi_distance: np.ndarray
    atomic_masses: np.ndarray

    def __post_init__(self):
        self._hop_cache = {}

    @property
    def n_vertices(self) -> int:
        return len(self.degrees)

    @property
    def rho0(self) -> int:
        """Bounded-geometry constant: the maximum vertex degree."""
        return int(self.degrees.max()) if len(self.degrees) else 0

    @property
    def n_components(self) -> int:
        return int(self.component_labels.max()) + 1 if len(self.component_labels) else 0

    def largest_component(self) -> np.ndarray:
        counts = np.bincount(self.component_labels)
        return np.nonzero(self.component_labels == np.argmax(counts))[0]

    def hop_distances(self, source: int) -> np.ndarray:
        """BFS hop distances from a vertex; -1 marks other components."""
        source = int(source)
        if source not in self._hop_cache:
            self._hop_cache[source] = kernels.bfs_levels(self.indptr, self.indices, source)
        return self._hop_cache[source]

    @classmethod
    def from_edges(cls, edges, n_vertices=None) -> "DiscretizationGraph":
        """Bare graph from an edge array; no space, cells or masses attached."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if n_vertices is None:
            n_vertices = int(edges.max()) + 1 if len(edges) else 0
        if n_vertices < 1:
            raise ValidationError("graph needs at least one vertex")
        indptr, indices, degrees = _csr(edges, n_vertices)
        return cls(
            space=None, sample=None, net=None, pattern=None,
            indptr=indptr, indices=indices, degrees=degrees,
            component_labels=_components(indptr, indices, n_vertices),
            voronoi_assignment=np.empty(0, np.int64),
            voronoi_distance=np.empty(0),
            atomic_masses=np.empty(0),
        )

    @classmethod
    def from_edges_file(cls, path) -> "DiscretizationGraph":
        """Read an 'i j' edge list (one edge per line)."""
        pairs = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                a, b = line.split()
                pairs.append((int(a), int(b)))
        return cls.from_edges(np.asarray(pairs, dtype=np.int64).reshape(-1, 2))


def _csr(edges, n):
    """Undirected CSR adjacency plus degrees from an (E, 2) edge array."""
    degrees = np.zeros(n, dtype=np.int64)
    if len(edges):
        np.add.at(degrees, edges[:, 0], 1)
        np.add.at(degrees, edges[:, 1], 1)
    heads = np.concatenate((edges[:, 0], edges[:, 1])) if len(edges) else np.empty(0, np.int64)
    tails = np.concatenate((edges[:, 1], edges[:, 0])) if len(edges) else np.empty(0, np.int64)
    order = np.lexsort((tails, heads))
    indices = tails[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, heads + 1, 1)
    return np.cumsum(indptr), indices, degrees


def build_graph(space, net, pattern, sample) -> DiscretizationGraph:
    """Assemble the graph: pattern edges, degrees, components, and the
    nearest-center assignment of every sample point (ties to the lowest
    center position) with cell masses from the sample weights."""
    n = pattern.n_vertices
    edges = np.asarray(pattern.edges, dtype=np.int64).reshape(-1, 2)
    indptr, indices, degrees = _csr(edges, n)
    labels = _components(indptr, indices, n)

    kind, coords, param = space.kernel_payload(sample)
    assignment, vdist = kernels.nearest_center(kind, coords, param, net.centers)
    weights = space.sample_weights(sample)
    masses = np.zeros(n)
    np.add.at(masses, assignment, weights)

    return DiscretizationGraph(
        space=space,
        sample=sample,
        net=net,
        pattern=pattern,
        indptr=indptr,
        indices=indices,
        degrees=degrees,
        component_labels=labels,
        voronoi_assignment=assignment,
        voronoi_distance=vdist,
        atomic_masses=masses,
    )


def _components(indptr, indices, n):
    labels = np.full(n, -1, dtype=np.int64)
    label = 0
    for v in range(n):
        if labels[v] >= 0:
            continue
        reach = kernels.bfs_levels(indptr, indices, v)
        labels[reach >= 0] = label
        label += 1
    return labels


@dataclass
class RoughIsometryCertificate:
    """Empirical two-sided affine distortion between the space metric d and
    the hop metric over sampled center pairs:

        (1/a) d - b <= hop <= a d + b      on every tested pair,

    with ``eps1`` the net's covering radius (fullness of the space-to-net
    map) and ``violations`` any pair breaking d <= 2 eps hop beyond 1e-9.
    """

    a: float
    b: float
    eps1: float
    n_pairs: int
    violations: list  # (center i, center j, d, hop)
    envelope: dict  # binned (d, hop) extremes backing the fit
    restricted_to_component: bool


def rough_isometry_certificate(space, graph, pair_budget=2000, seed=0) -> RoughIsometryCertificate:
    """Certify rough isometry over ``pair_budget`` random center pairs.

    Pairs are grouped by BFS source for efficiency.  The constant ``a`` comes
    from least-squares lines through the upper and lower envelopes of the
    (d, hop) scatter; ``b`` is then the maximum residual, making both
    inequalities hold exactly on every tested pair.  The zero-tolerance lower
    bound d <= 2 eps hop is audited on every pair.
    """
    n = graph.n_vertices
    restricted = False
    vertices = np.arange(n)
    if graph.n_components > 1:
        vertices = graph.largest_component()
        restricted = True
        warnings.warn(
            f"graph has {graph.n_components} components; certificate restricted to the "
            f"largest ({len(vertices)} of {n} vertices)",
            stacklevel=2,
        )
    if len(vertices) < 2:
        return RoughIsometryCertificate(
            a=1.0, b=0.0, eps1=graph.net.covering, n_pairs=0, violations=[],
            envelope={"d": [], "hop_min": [], "hop_max": []}, restricted_to_component=restricted,
        )

    rng = np.random.default_rng(seed)
    n_sources = int(min(len(vertices), max(1, math.ceil(pair_budget / 64))))
    sources = rng.choice(vertices, size=n_sources, replace=False)
    per_source = int(math.ceil(pair_budget / n_sources))

    kind, coords, param = space.kernel_payload(graph.sample)
    pair_i, pair_j, hops = [], [], []
    for s in sources:
        levels = graph.hop_distances(int(s))
        targets = rng.choice(vertices, size=per_source, replace=True)
        targets = targets[targets != s]
        pair_i.append(np.full(len(targets), s, dtype=np.int64))
        pair_j.append(targets)
        hops.append(levels[targets])
    pair_i = np.concatenate(pair_i)[:pair_budget]
    pair_j = np.concatenate(pair_j)[:pair_budget]
    hops = np.concatenate(hops)[:pair_budget].astype(np.float64)
    d = kernels.pairs_distances(
        kind, coords, param, graph.net.centers[pair_i], graph.net.centers[pair_j]
    )

    eps = graph.net.eps
    slack = 2.0 * eps * hops - d
    bad = np.nonzero(slack < -1e-9)[0]
    violations = [
        (int(pair_i[t]), int(pair_j[t]), float(d[t]), int(hops[t])) for t in bad
    ]
    if len(violations):
        warnings.warn(
            f"{len(violations)} pairs break d <= 2*eps*hop; the sample looks "
            "geodesically too sparse",
            stacklevel=2,
        )

    a, b, envelope = _envelope_constants(d, hops)
    return RoughIsometryCertificate(
        a=a,
        b=b,
        eps1=graph.net.covering,
        n_pairs=len(d),
        violations=violations,
        envelope=envelope,
        restricted_to_component=restricted,
    )


def _envelope_constants(d, hops, n_bins=16):
    """Tightest (a >= 1, b >= 0) with (1/a) d - b <= hop <= a d + b on all pairs."""
    pos = d > 0
    ratios = np.concatenate((hops[pos] / d[pos], d[pos] / np.maximum(hops[pos], 1.0)))
    a = max(1.0, float(ratios.max()) if ratios.size else 1.0)

    bins = np.linspace(d.min(), d.max(), n_bins + 1)
    which = np.clip(np.digitize(d, bins) - 1, 0, n_bins - 1)
    env_d, env_lo, env_hi = [], [], []
    up_pts, lo_pts = [], []
    for t in range(n_bins):
        mask = which == t
        if not mask.any():
            continue
        i_hi = np.argmax(np.where(mask, hops, -np.inf))
        i_lo = np.argmin(np.where(mask, hops, np.inf))
        env_d.append(float(0.5 * (bins[t] + bins[t + 1])))
        env_hi.append(float(hops[i_hi]))
        env_lo.append(float(hops[i_lo]))
        up_pts.append((d[i_hi], hops[i_hi]))
        lo_pts.append((d[i_lo], hops[i_lo]))
    if len(up_pts) >= 2:
        du, hu = np.array(up_pts).T
        dl, hl = np.array(lo_pts).T
        a_up = float(np.polyfit(du, hu, 1)[0])
        s_lo = float(np.polyfit(dl, hl, 1)[0])
        cand = [1.0, a_up]
        if s_lo > 0:
            cand.append(1.0 / s_lo)
        a = max(a, *cand)
    b = max(0.0, float(np.max(hops - a * d)), float(np.max(d / a - hops)))
    envelope = {"d": env_d, "hop_min": env_lo, "hop_max": env_hi}
    return a, b, envelope


@dataclass
class BoundedGeometryReport:
    """Maximum degree against the analytic degree bound (K <= 0 regimes)."""

    rho0: int
    analytic_bound: int | None
    passed: bool | None
    regime: str


def bounded_geometry_check(graph, cd=None, eps=None) -> BoundedGeometryReport:
    """Compare the empirical degree bound rho0 with the analytic one.

    For K > 0 the analytic bound is undefined; the empirical rho0 is still
    reported with regime "unsupported (K > 0)".
    """
    if cd is None:
        cd = graph.space.cd_data
    if eps is None:
        eps = graph.net.eps
    rho0 = graph.rho0
    if cd.K > 0.0 or not math.isfinite(cd.N):
        return BoundedGeometryReport(
            rho0=rho0, analytic_bound=None, passed=None, regime="unsupported (K > 0)"
        )
    bound = bound_degree(cd, eps)
    return BoundedGeometryReport(
        rho0=rho0, analytic_bound=bound, passed=rho0 <= bound, regime="K <= 0"
    )


def validate_masses(graph, rel_tol=1e-12) -> bool:
    """Mass conservation: cell masses sum to the total sample measure."""
    total = float(graph.space.sample_weights(graph.sample).sum())
    got = float(graph.atomic_masses.sum())
    if total == 0.0:
        return got == 0.0
    if abs(got - total) > rel_tol * abs(total):
        raise ValidationError(f"mass leak: cells sum to {got}, sample to {total}")
    return True
