"""Flag complex over an intersection pattern, distance-only simplex volumes,
and the thickness quality measure.

Simplices carry no coordinates: volumes come from pairwise distances alone
(bordered determinant of squared distances), realized Euclidean geometry is
recovered only where a realization exists.  Thickness of a simplex is the
infimum over all faces of (face j-volume) / (face diameter)^j, with vertices
contributing 1 by convention; degenerate faces give 0.
"""

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ValidationError


def flag_complex(pattern, dim_cap: int) -> "SimplicialComplex":
    """All cliques of the pattern graph with at most dim_cap+1 vertices.

    Downward closure holds by construction (faces of cliques are cliques).
    """
    if dim_cap < 1:
        raise ValidationError("dim_cap must be >= 1")
    n = pattern.n_vertices
    adj = [set() for _ in range(n)]
    for a, b in pattern.edges:
        adj[int(a)].add(int(b))
        adj[int(b)].add(int(a))
    simplices = {0: np.arange(n, dtype=np.int64)[:, None]}
    if len(pattern.edges):
        simplices[1] = np.asarray(pattern.edges, dtype=np.int64)
    current = [tuple(e) for e in pattern.edges]
    dim = 1
    while current and dim < dim_cap:
        nxt = []
        for clique in current:
            common = adj[clique[0]].intersection(*(adj[v] for v in clique[1:]))
            for w in sorted(c for c in common if c > clique[-1]):
                nxt.append(clique + (w,))
        dim += 1
        if nxt:
            simplices[dim] = np.asarray(sorted(nxt), dtype=np.int64)
        current = nxt
    return SimplicialComplex(n_vertices=n, simplices=simplices)


@dataclass
class SimplicialComplex:
    """Simplices by dimension, as sorted tuples of vertex indices.

    ``edge_lengths`` maps 1-simplices to ambient distances once a metric has
    been attached (see :func:`triangulate`).
    """

    n_vertices: int
    simplices: dict  # dim -> (count, dim+1) int64 array
    edge_lengths: dict | None = None

    @property
    def dim(self) -> int:
        return max(self.simplices)

    def count(self, dim: int) -> int:
        return len(self.simplices.get(dim, ()))

    def one_skeleton(self):
        return {(int(a), int(b)) for a, b in self.simplices.get(1, ())}


def simplex_volume(dist: np.ndarray) -> float:
    """Euclidean j-volume of the simplex realizing the given pairwise
    distances ((j+1) x (j+1) symmetric matrix).

    Computed from the bordered determinant of squared distances:
    vol^2 = (-1)^(j+1) / (2^j (j!)^2) * det of the bordered matrix.
    A negative squared volume (not realizable, or degenerate within floating
    noise) yields 0.  A single vertex has volume 1 by convention.
    """
    D = np.asarray(dist, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValidationError("expected a square distance matrix")
    j = D.shape[0] - 1
    if j == 0:
        return 1.0
    M = np.ones((j + 2, j + 2))
    M[0, 0] = 0.0
    M[1:, 1:] = D * D
    det = np.linalg.det(M)
    vol2 = (-1.0) ** (j + 1) / (2.0**j * math.factorial(j) ** 2) * det
    if vol2 <= 0.0:
        return 0.0
    return math.sqrt(vol2)


def thickness(dist: np.ndarray) -> float:
    """Minimum over all faces of face-volume over face-diameter^(face dim).

    Vertices and edges contribute 1 exactly, so the value is in [0, 1];
    scale-invariant; 0 for degenerate simplices.
    """
    D = np.asarray(dist, dtype=np.float64)
    n = D.shape[0]
    phi = 1.0
    for size in range(3, n + 1):
        for face in itertools.combinations(range(n), size):
            sub = D[np.ix_(face, face)]
            diam = sub.max()
            if diam <= 0.0:
                return 0.0
            phi = min(phi, simplex_volume(sub) / diam ** (size - 1))
            if phi == 0.0:
                return 0.0
    return phi


def realize_coordinates(dist: np.ndarray) -> np.ndarray | None:
    """Euclidean coordinates realizing the distances (centered), or None if
    the matrix is not realizable at full rank."""
    D = np.asarray(dist, dtype=np.float64)
    n = D.shape[0]
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ (D * D) @ J
    vals, vecs = np.linalg.eigh(B)
    if vals[0] < -1e-9 * max(vals[-1], 1.0):
        return None
    keep = vals > max(vals[-1], 0.0) * 1e-12
    if keep.sum() < n - 1:
        return None
    return vecs[:, keep] * np.sqrt(vals[keep])


def min_dihedral_angle(dist: np.ndarray) -> float:
    """Smallest interior dihedral angle (radians) of the realized simplex;
    0 when the distances admit no full-rank realization."""
    X = realize_coordinates(dist)
    if X is None:
        return 0.0
    n = X.shape[0]
    normals = []
    for i in range(n):
        others = np.delete(np.arange(n), i)
        base = X[others[0]]
        E = X[others[1:]] - base
        v = X[i] - base
        if E.shape[0]:
            Q, _ = np.linalg.qr(E.T)
            v = v - Q @ (Q.T @ v)
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            return 0.0
        normals.append(-v / norm)
    angle = math.pi
    for i in range(n):
        for k in range(i + 1, n):
            c = float(np.dot(normals[i], normals[k]))
            angle = min(angle, math.acos(min(1.0, max(-1.0, -c))))
    return angle


@dataclass
class ThicknessReport:
    """Per-simplex thickness with the global minimum and a histogram."""

    phi_by_dim: dict  # dim -> float array aligned with the complex's simplices
    min_phi: float
    histogram: tuple  # (counts, bin edges) over simplices of dim >= 2
    threshold: float
    below_threshold: list  # (simplex tuple, phi)
    min_dihedral: float | None  # over top-dimensional simplices, dim >= 2


def triangulate(space, sample, net, pattern, dim_cap=None, thickness_threshold=0.0):
    """Flag complex of the pattern with thickness from ambient distances.

    Edge lengths are the space's distances between net centers; faces use
    the distance-only volume, an approximation for curved geometries.  Warns
    when eps exceeds the known convexity radius (round spheres: pi/2 scale).
    """
    if dim_cap is None:
        dim_cap = space.cd_data.topological_dim
    _convexity_warning(space, net.eps)
    complex_ = flag_complex(pattern, dim_cap)
    kind, coords, param = space.kernel_payload(sample)
    lengths = {}
    if len(pattern.edges):
        ii = net.centers[pattern.edges[:, 0]]
        jj = net.centers[pattern.edges[:, 1]]
        dvals = kernels.pairs_distances(kind, coords, param, ii, jj)
        lengths = {
            (int(a), int(b)): float(d) for (a, b), d in zip(pattern.edges, dvals)
        }
    complex_.edge_lengths = lengths

    def simplex_matrix(simp):
        k = len(simp)
        D = np.zeros((k, k))
        for x in range(k):
            for y in range(x + 1, k):
                D[x, y] = D[y, x] = lengths[(int(simp[x]), int(simp[y]))]
        return D

    phi_by_dim = {0: np.ones(complex_.count(0))}
    flagged = []
    high_phis = []
    for dim in range(1, complex_.dim + 1):
        simps = complex_.simplices.get(dim)
        if simps is None:
            continue
        vals = np.empty(len(simps))
        for t, simp in enumerate(simps):
            vals[t] = thickness(simplex_matrix(simp))
            if vals[t] < thickness_threshold:
                flagged.append((tuple(int(v) for v in simp), float(vals[t])))
        phi_by_dim[dim] = vals
        if dim >= 2:
            high_phis.append(vals)
    all_phi = np.concatenate([phi_by_dim[d] for d in sorted(phi_by_dim)])
    min_phi = float(all_phi.min()) if all_phi.size else 1.0
    hist_data = np.concatenate(high_phis) if high_phis else np.empty(0)
    histogram = np.histogram(hist_data, bins=20, range=(0.0, 1.0))

    min_dihedral = None
    top = complex_.dim
    if top >= 2:
        min_dihedral = math.pi
        for simp in complex_.simplices[top]:
            min_dihedral = min(min_dihedral, min_dihedral_angle(simplex_matrix(simp)))
        min_dihedral = float(min_dihedral)

    report = ThicknessReport(
        phi_by_dim=phi_by_dim,
        min_phi=min_phi,
        histogram=histogram,
        threshold=thickness_threshold,
        below_threshold=flagged,
        min_dihedral=min_dihedral,
    )
    return complex_, report


def _convexity_warning(space, eps):
    scale = getattr(space, "scale", None)
    if getattr(space, "kind", None) == "sphere" and scale is not None:
        conv_rad = 0.5 * math.pi * scale
        if eps > conv_rad:
            warnings.warn(
                f"eps={eps} exceeds the convexity radius {conv_rad:.6g}; "
                "simplices need not be convex",
                stacklevel=3,
            )
