"""Maximal eps-separated nets over a space sample, with separation/covering
certificates, the ball-intersection pattern, and labeled-pattern comparison.

A net is maximal for inclusion: every sample point is within eps of a center
(so the eps-balls cover the sample) while centers stay pairwise >= eps apart
(so the eps/2-balls are disjoint).  Construction is greedy over a seeded
order; farthest-point insertion is available as an alternative strategy with
lower covering radii.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .comparison import bound_n3
from .errors import ValidationError

#: boundary slack for ball intersection: two eps-balls meet iff the centers
#: are strictly closer than 2*eps; ties within this tolerance are excluded
EDGE_TOL = 1e-12


@dataclass
class EpsilonNet:
    """Maximal eps-separated subset of a sample, by positional index.

    ``separation`` is the exact minimum pairwise center distance (>= eps);
    ``covering`` the exact maximum distance from any sample point to its
    nearest center (<= eps by maximality).
    """

    eps: float
    centers: np.ndarray
    ambient_sample_size: int
    separation: float
    covering: float
    strategy: str
    seed: int

    def __len__(self):
        return len(self.centers)


@dataclass
class IntersectionPattern:
    """Graph on net centers with an edge whenever the two eps-balls meet.

    ``overlap_counts[k]`` counts the net balls meeting ball k, including
    ball k itself (so it equals degree + 1).
    """

    eps: float
    n_vertices: int
    edges: np.ndarray  # (E, 2), lexicographic, k < l
    overlap_counts: np.ndarray

    def edge_set(self):
        return {(int(a), int(b)) for a, b in self.edges}


def build_net(space, sample, eps, seed, strategy: str = "random") -> EpsilonNet:
    """Greedy maximal eps-separated subset of ``sample``.

    ``random`` scans a seed-determined permutation and admits a point iff it
    is >= eps from every admitted point; ``farthest`` inserts the point
    farthest from the current centers until the covering radius drops below
    eps.  Both satisfy separation >= eps and covering <= eps over the sample.
    """
    m = len(sample)
    if m == 0:
        raise ValidationError("empty sample")
    if not eps > 0:
        raise ValidationError("eps must be positive")
    kind, coords, param = space.kernel_payload(sample)
    rng = np.random.default_rng(seed)
    if strategy == "random":
        order = rng.permutation(m)
        centers, dmin = kernels.greedy_net(kind, coords, param, order, eps)
    elif strategy == "farthest":
        start = int(rng.integers(m))
        centers, dmin = kernels.farthest_net(kind, coords, param, start, eps)
    else:
        raise ValidationError(f"unknown strategy {strategy!r}")
    if len(centers) > 1:
        _, separation = kernels.radius_edges(kind, coords, param, centers, 0.0)
    else:
        separation = math.inf
    return EpsilonNet(
        eps=float(eps),
        centers=centers,
        ambient_sample_size=m,
        separation=float(separation),
        covering=float(dmin.max()),
        strategy=strategy,
        seed=int(seed),
    )


def intersection_pattern(space, sample, net: EpsilonNet) -> IntersectionPattern:
    """Edges (k, l) with d(p_k, p_l) < 2*eps (open balls; exact ties excluded)."""
    kind, coords, param = space.kernel_payload(sample)
    threshold = 2.0 * net.eps - EDGE_TOL
    edges, _ = kernels.radius_edges(kind, coords, param, net.centers, threshold)
    counts = np.ones(len(net.centers), dtype=np.int64)
    if len(edges):
        np.add.at(counts, edges[:, 0], 1)
        np.add.at(counts, edges[:, 1], 1)
    return IntersectionPattern(
        eps=net.eps,
        n_vertices=len(net.centers),
        edges=edges,
        overlap_counts=counts,
    )


def center_distances(space, sample, net: EpsilonNet) -> np.ndarray:
    """Full pairwise distance matrix between net centers (ambient metric)."""
    kind, coords, param = space.kernel_payload(sample)
    return kernels.pairwise_distances(kind, coords, param, net.centers)


@dataclass
class PatternComparison:
    """Result of comparing two labeled patterns of equal size."""

    identical: bool
    symmetric_difference: list
    n3: int | None
    checked_pairs: int
    violations: list  # (i, j, d1, d2) with d1 < C*eps but d2 >= n3*eps


def compare_patterns(
    a: IntersectionPattern,
    b: IntersectionPattern,
    dist_a: np.ndarray | None = None,
    dist_b: np.ndarray | None = None,
    cd=None,
    C: float | None = None,
) -> PatternComparison:
    """Compare two labeled patterns under the identity labeling.

    With center-distance matrices, declared (K, N, D) data and a constant C,
    additionally audits the distance-transfer bound: every pair at distance
    < C*eps in the first net must be at distance < n3(C)*eps in the second.
    """
    if a.n_vertices != b.n_vertices:
        raise ValidationError(
            f"pattern size mismatch: {a.n_vertices} vs {b.n_vertices}"
        )
    ea, eb = a.edge_set(), b.edge_set()
    sym = sorted(ea ^ eb)
    n3 = None
    violations = []
    checked = 0
    if dist_a is not None and dist_b is not None and cd is not None and C is not None:
        if abs(a.eps - b.eps) > 1e-9 * max(a.eps, b.eps):
            raise ValidationError("distance-transfer audit needs equal eps on both nets")
        n3 = bound_n3(cd, a.eps, C)
        da = np.asarray(dist_a, dtype=np.float64)
        db = np.asarray(dist_b, dtype=np.float64)
        n = a.n_vertices
        if da.shape != (n, n) or db.shape != (n, n):
            raise ValidationError("distance matrices must match the pattern size")
        iu = np.triu_indices(n, 1)
        close = da[iu] < C * a.eps
        checked = int(close.sum())
        far = db[iu] >= n3 * a.eps
        bad = np.nonzero(close & far)[0]
        for t in bad:
            i, j = int(iu[0][t]), int(iu[1][t])
            violations.append((i, j, float(da[i, j]), float(db[i, j])))
    return PatternComparison(
        identical=not sym,
        symmetric_difference=sym,
        n3=n3,
        checked_pairs=checked,
        violations=violations,
    )
