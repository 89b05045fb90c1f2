"""Metric measure spaces: constant-curvature models, weighted Euclidean space,
file-loaded point clouds, and the information-geometry probability simplex.

A space bundles a distance, a reference measure (queried through ball
measures), a seeded sampler, and declared curvature-dimension data (K, N, D).
Continuous spaces are operated on through dense i.i.d. samples; Monte-Carlo
ball measures count points of a fixed internal sample (the estimation budget
is that sample's size), so all results are deterministic given the seeds.

All space objects are immutable after construction and safe to share across
threads; samplers take explicit seeds.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from ._profile import domain_limit, profile_integral
from .errors import DomainError, ValidationError

#: probability vectors must sum to 1 within this tolerance
PROB_TOL = 1e-9


def unit_sphere_area(n: int) -> float:
    """Surface area of the unit (n-1)-sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class CurvatureDimensionData:
    """Declared curvature-dimension data of a space.

    K is the lower Ricci-type bound, N >= 1 the effective dimension,
    D > 0 an upper diameter bound, and topological_dim the honest dimension
    (which must not exceed N).  These are inputs, never computed.
    """

    K: float
    N: float
    D: float
    topological_dim: int

    def __post_init__(self):
        if self.N < 1.0:
            raise ValidationError(f"effective dimension N={self.N} must be >= 1")
        if self.topological_dim < 1:
            raise ValidationError("topological dimension must be >= 1")
        if self.N < self.topological_dim:
            raise ValidationError(
                f"N={self.N} smaller than topological dimension {self.topological_dim}"
            )
        if not self.D > 0.0:
            raise ValidationError(f"diameter bound D={self.D} must be positive")
        if self.K > 0.0 and self.D > domain_limit(self.K, self.N) * (1.0 + 1e-12):
            raise ValidationError(
                f"D={self.D} exceeds the comparison domain {domain_limit(self.K, self.N)} for K={self.K}, N={self.N}"
            )


class MetricMeasureSpace:
    """Abstract capability: distance + measure + sampler + declared (K, N, D).

    Concrete spaces implement ``distance``, ``distance_to_many``, ``sample``,
    ``sample_weights``, ``ball_measure``, ``total_measure`` and
    ``kernel_payload``.
    """

    cd_data: CurvatureDimensionData

    def distance(self, x, y) -> float:
        raise NotImplementedError

    def distance_to_many(self, x, pts) -> np.ndarray:
        raise NotImplementedError

    def sample(self, count: int, seed: int):
        raise NotImplementedError

    def sample_weights(self, pts) -> np.ndarray:
        """Per-point masses of a sample, summing to the (estimated) total measure."""
        raise NotImplementedError

    def ball_measure(self, center, r: float, budget: int | None = None) -> float:
        raise NotImplementedError

    def total_measure(self) -> float:
        raise NotImplementedError

    def base_point(self):
        raise NotImplementedError

    def domain_diameter(self) -> float:
        """Diameter of the region the sampler actually covers."""
        return self.cd_data.D

    def kernel_payload(self, pts):
        """(metric kind, coordinate array, scale parameter) for the hot kernels."""
        raise NotImplementedError

    def mesh_coordinates(self, pts):
        """3-column embedding coordinates for mesh export, or None."""
        return None


class _SampledMeasureMixin:
    """Monte-Carlo ball measures over a fixed internal sample per budget."""

    mc_seed: int = 0

    def _mc_sample(self, budget):
        cache = self.__dict__.setdefault("_mc_cache", {})
        if budget not in cache:
            pts = self.sample(budget, np.random.SeedSequence((self.mc_seed, budget)))
            cache[budget] = (pts, self.sample_weights(pts))
        return cache[budget]

    def ball_measure(self, center, r, budget=None):
        if budget is None:
            raise ValidationError(f"{type(self).__name__} needs an estimation budget")
        pts, weights = self._mc_sample(int(budget))
        d = self.distance_to_many(center, pts)
        return float(weights[d <= r].sum())


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class ModelSpace(_SampledMeasureMixin, MetricMeasureSpace):
    """Constant-curvature model: euclidean cube, round sphere, or a bounded
    disk of the hyperbolic space (Poincare ball coordinates).

    ``curvature`` is the sectional curvature (0, +c, -c); the declared Ricci
    bound defaults to (dim-1)*curvature and the effective dimension to dim,
    both overridable since they are inputs of the comparison machinery, not
    of the geometry.

    ``extent`` bounds the sampling region: the side of the centered cube for
    the euclidean kind, the intrinsic disk radius for the hyperbolic kind.
    """

    def __init__(self, kind, dim, curvature=0.0, extent=None, K=None, N=None, D=None, mc_seed=0):
        if kind not in ("euclidean", "sphere", "hyperbolic"):
            raise ValidationError(f"unknown model kind {kind!r}")
        if dim < 1:
            raise ValidationError("dim must be >= 1")
        self.kind = kind
        self.dim = int(dim)
        self.curvature = float(curvature)
        self.mc_seed = int(mc_seed)

        if kind == "euclidean":
            if self.curvature != 0.0:
                raise ValidationError("euclidean space has curvature 0")
            if extent is None or extent <= 0:
                raise ValidationError("euclidean model needs a positive extent (cube side)")
            self.extent = float(extent)
            self.scale = 1.0
            default_D = self.extent * math.sqrt(self.dim)
        elif kind == "sphere":
            if self.curvature <= 0.0:
                raise ValidationError("sphere needs positive curvature")
            self.scale = 1.0 / math.sqrt(self.curvature)  # sphere radius
            self.extent = math.pi * self.scale
            default_D = math.pi * self.scale
        else:
            if self.curvature >= 0.0:
                raise ValidationError("hyperbolic space needs negative curvature")
            if extent is None or extent <= 0:
                raise ValidationError("hyperbolic model needs a positive extent (disk radius)")
            self.scale = 1.0 / math.sqrt(-self.curvature)
            self.extent = float(extent)
            default_D = 2.0 * self.extent

        self.cd_data = CurvatureDimensionData(
            K=float(K) if K is not None else (self.dim - 1) * self.curvature,
            N=float(N) if N is not None else float(self.dim),
            D=float(D) if D is not None else default_D,
            topological_dim=self.dim,
        )

    # -- metric ------------------------------------------------------------

    def distance(self, x, y):
        return float(self.distance_to_many(x, np.asarray(y, dtype=np.float64)[None, :])[0])

    def distance_to_many(self, x, pts):
        x = np.asarray(x, dtype=np.float64)
        pts = np.asarray(pts, dtype=np.float64)
        if self.kind == "euclidean":
            diff = pts - x
            return np.sqrt(np.sum(diff * diff, axis=1))
        if self.kind == "sphere":
            c = pts @ x / (self.scale * self.scale)
            return self.scale * np.arccos(np.clip(c, -1.0, 1.0))
        diff = pts - x
        ss = np.sum(diff * diff, axis=1)
        arg = 1.0 + 2.0 * ss / ((1.0 - x @ x) * (1.0 - np.sum(pts * pts, axis=1)))
        return self.scale * np.arccosh(np.maximum(arg, 1.0))

    # -- sampling ----------------------------------------------------------

    def sample(self, count, seed):
        if count < 1:
            raise ValidationError("sample count must be >= 1")
        rng = _as_rng(seed)
        if self.kind == "euclidean":
            return rng.uniform(-0.5 * self.extent, 0.5 * self.extent, size=(count, self.dim))
        if self.kind == "sphere":
            g = rng.standard_normal(size=(count, self.dim + 1))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            return g * self.scale
        # hyperbolic disk: uniform direction, radial CDF proportional to the
        # sphere-of-radius-t area sinh(t/scale)^(dim-1)
        dirs = rng.standard_normal(size=(count, self.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        u = rng.uniform(0.0, 1.0, size=count)
        t = self._hyperbolic_radius(u)
        return dirs * np.tanh(t / (2.0 * self.scale))[:, None]

    def _hyperbolic_radius(self, u):
        if self.dim == 2:
            cap = math.cosh(self.extent / self.scale) - 1.0
            return self.scale * np.arccosh(1.0 + u * cap)
        grid = np.linspace(0.0, self.extent, 4097)
        dens = np.sinh(grid / self.scale) ** (self.dim - 1)
        cdf = np.concatenate(([0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(grid))))
        cdf /= cdf[-1]
        return np.interp(u, cdf, grid)

    def sample_weights(self, pts):
        return np.full(len(pts), self.total_measure() / len(pts))

    # -- measure -----------------------------------------------------------

    def total_measure(self):
        if self.kind == "euclidean":
            return self.extent**self.dim
        if self.kind == "sphere":
            return model_ball_volume(self, math.pi * self.scale)
        return model_ball_volume(self, self.extent)

    def ball_measure(self, center, r, budget=None):
        if budget is None:
            self._require_contained(center, r)
            return model_ball_volume(self, r)
        return _SampledMeasureMixin.ball_measure(self, center, r, budget)

    def _require_contained(self, center, r):
        center = np.asarray(center, dtype=np.float64)
        if self.kind == "sphere":
            return
        if self.kind == "euclidean":
            if np.max(np.abs(center)) + r > 0.5 * self.extent * (1.0 + 1e-12):
                raise DomainError(
                    "closed-form ball volume needs the ball inside the sampled cube; pass a budget"
                )
            return
        if self.distance(center, np.zeros(self.dim)) + r > self.extent * (1.0 + 1e-12):
            raise DomainError(
                "closed-form ball volume needs the ball inside the sampled disk; pass a budget"
            )

    # -- plumbing ----------------------------------------------------------

    def base_point(self):
        if self.kind == "sphere":
            p = np.zeros(self.dim + 1)
            p[-1] = self.scale
            return p
        return np.zeros(self.dim)

    def domain_diameter(self):
        if self.kind == "euclidean":
            return self.extent * math.sqrt(self.dim)
        if self.kind == "sphere":
            return math.pi * self.scale
        return 2.0 * self.extent

    def kernel_payload(self, pts):
        pts = np.ascontiguousarray(pts, dtype=np.float64)
        if self.kind == "euclidean":
            return kernels.KIND_EUCLIDEAN, pts, 0.0
        if self.kind == "sphere":
            return kernels.KIND_SPHERE, pts, self.scale
        return kernels.KIND_POINCARE, pts, self.scale

    def mesh_coordinates(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        if pts.shape[1] == 3:
            return pts
        if pts.shape[1] < 3:
            return np.pad(pts, ((0, 0), (0, 3 - pts.shape[1])))
        return None


def model_ball_volume(space: ModelSpace, r: float) -> float:
    """Exact volume of a metric ball of radius ``r`` in the model geometry.

    The radial area density is area(S^{n-1}) * (scale * sin(t/scale))^(n-1)
    (sinh for negative curvature, plain t for flat), so the volume is the
    unit-sphere area times scale^(n-1) times the comparison-density integral
    taken at the geometric bound K = (n-1)*curvature.
    """
    if r < 0:
        raise DomainError("radius must be nonnegative")
    n = space.dim
    K_geom = (n - 1) * space.curvature
    if space.kind == "sphere" and r > math.pi * space.scale * (1.0 + 1e-12):
        raise DomainError(f"radius {r} exceeds the spherical diameter {math.pi * space.scale}")
    factor = space.scale ** (n - 1) if space.kind != "euclidean" else 1.0
    return unit_sphere_area(n) * factor * profile_integral(K_geom, float(n), r)


class WeightedSpace(_SampledMeasureMixin, MetricMeasureSpace):
    """Euclidean base geometry with measure density exp(log_density(x)).

    ``log_density`` maps points to log(d(measure)/d(volume)); the sampler
    draws uniformly from the base cube and ``sample_weights`` carries the
    importance weights, so ball measures are weighted point counts.  The
    curvature-dimension data (K, N) must be declared by the caller.
    """

    PRESETS = {
        "gaussian": lambda x: -np.sum(np.asarray(x, dtype=np.float64) ** 2, axis=-1)
        - 0.5 * np.asarray(x).shape[-1] * math.log(2.0 * math.pi),
        "zero": lambda x: np.zeros(np.asarray(x).shape[:-1]),
    }

    def __init__(self, dim, extent, log_density, K, N, D=None, normalization=None, mc_seed=0):
        self.base = ModelSpace("euclidean", dim, extent=extent, K=K, N=N, D=D, mc_seed=mc_seed)
        self.dim = self.base.dim
        self.extent = self.base.extent
        if isinstance(log_density, str):
            try:
                log_density = self.PRESETS[log_density]
            except KeyError:
                raise ValidationError(f"unknown log-density preset {log_density!r}") from None
        self.log_density = log_density
        self.normalization = normalization  # numeric, or None for "unnormalized"
        self.mc_seed = int(mc_seed)
        self.cd_data = self.base.cd_data

    def distance(self, x, y):
        return self.base.distance(x, y)

    def distance_to_many(self, x, pts):
        return self.base.distance_to_many(x, pts)

    def sample(self, count, seed):
        return self.base.sample(count, seed)

    def sample_weights(self, pts):
        logd = np.asarray(self.log_density(pts), dtype=np.float64)
        if not np.all(np.isfinite(logd)):
            raise ValidationError("log_density must be finite on every sampled point")
        w = np.exp(logd) * (self.extent**self.dim / len(pts))
        if self.normalization is not None:
            w /= float(self.normalization)
        return w

    def total_measure(self, budget=100_000):
        _, weights = self._mc_sample(budget)
        return float(weights.sum())

    def base_point(self):
        return self.base.base_point()

    def domain_diameter(self):
        return self.base.domain_diameter()

    def kernel_payload(self, pts):
        return self.base.kernel_payload(pts)

    def mesh_coordinates(self, pts):
        return self.base.mesh_coordinates(pts)


class PointCloudSpace(MetricMeasureSpace):
    """Finite space given by a distance matrix and per-point weights.

    Points are integer indices.  The matrix is validated on construction:
    symmetry, zero diagonal, nonnegativity and the triangle inequality over
    all triples (a violation is an error, not a warning).
    """

    def __init__(self, distance_matrix, weights=None, K=0.0, N=None, D=None):
        D_mat = np.ascontiguousarray(distance_matrix, dtype=np.float64)
        if D_mat.ndim != 2 or D_mat.shape[0] != D_mat.shape[1]:
            raise ValidationError("distance matrix must be square")
        n = D_mat.shape[0]
        if np.any(np.abs(np.diag(D_mat)) > 0):
            raise ValidationError("distance matrix must have a zero diagonal")
        if np.any(D_mat < 0):
            raise ValidationError("distances must be nonnegative")
        if not np.array_equal(D_mat, D_mat.T):
            if np.max(np.abs(D_mat - D_mat.T)) > 1e-9:
                raise ValidationError("distance matrix must be symmetric")
            D_mat = 0.5 * (D_mat + D_mat.T)
        i, j, k = kernels.triangle_violation(D_mat)
        if i >= 0:
            raise ValidationError(
                f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})"
            )
        self.matrix = D_mat
        self.n_points = n
        if weights is None:
            weights = np.ones(n)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)
        if self.weights.shape != (n,) or np.any(self.weights < 0):
            raise ValidationError("weights must be a nonnegative vector matching the matrix")
        diam = float(D_mat.max()) if n > 1 else 1.0
        self.cd_data = CurvatureDimensionData(
            K=float(K),
            N=float(N) if N is not None else 1.0,
            D=float(D) if D is not None else max(diam, np.finfo(float).tiny),
            topological_dim=1,
        )

    def distance(self, x, y):
        return float(self.matrix[int(x), int(y)])

    def distance_to_many(self, x, pts):
        return self.matrix[int(x), np.asarray(pts, dtype=np.int64)]

    def sample(self, count, seed):
        if count >= self.n_points:
            return np.arange(self.n_points, dtype=np.int64)
        rng = _as_rng(seed)
        return np.sort(rng.choice(self.n_points, size=count, replace=False)).astype(np.int64)

    def sample_weights(self, pts):
        return self.weights[np.asarray(pts, dtype=np.int64)]

    def ball_measure(self, center, r, budget=None):
        # exact: the measure is atomic, budget is irrelevant
        return float(self.weights[self.matrix[int(center)] <= r].sum())

    def total_measure(self):
        return float(self.weights.sum())

    def base_point(self):
        return 0

    def domain_diameter(self):
        return float(self.matrix.max())

    def kernel_payload(self, pts):
        idx = np.asarray(pts, dtype=np.int64)
        return kernels.KIND_PRECOMPUTED, self.matrix[np.ix_(idx, idx)], 0.0

    @classmethod
    def from_csv(cls, matrix_path, weights_path=None, **kw):
        matrix = _read_matrix_csv(matrix_path)
        weights = None
        if weights_path is not None:
            weights = np.loadtxt(weights_path, delimiter=",", ndmin=1)
        return cls(matrix, weights=weights, **kw)


def _read_matrix_csv(path):
    """Full symmetric or lower-triangular (row i holds i+1 entries) CSV."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rows.append([float(tok) for tok in line.replace(";", ",").split(",") if tok.strip()])
    n = len(rows)
    if n == 0:
        raise ValidationError(f"empty distance matrix file {path}")
    lengths = [len(r) for r in rows]
    if all(l == n for l in lengths):
        return np.asarray(rows, dtype=np.float64)
    if all(l == i + 1 for i, l in enumerate(lengths)):
        M = np.zeros((n, n))
        for i, r in enumerate(rows):
            M[i, : i + 1] = r
            M[: i + 1, i] = r
        return M
    raise ValidationError(f"{path}: expected a full square or lower-triangular matrix")


# ---------------------------------------------------------------------------
# information-geometry simplex

def _validate_prob(p, name="p"):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError(f"{name} must be a probability vector with >= 2 atoms")
    if np.any(p <= 0.0):
        raise ValidationError(f"{name} must be strictly positive (boundary points rejected)")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValidationError(f"{name} must sum to 1 (got {p.sum()!r})")
    return p


def fisher_embed(p, radius: float = 2.0) -> np.ndarray:
    """Square-root embedding of a probability vector onto the positive orthant
    of the sphere of the given radius (coordinates radius * sqrt(p))."""
    p = _validate_prob(p)
    return radius * np.sqrt(p)


def fisher_distance(p, q) -> float:
    """Geodesic distance between interior probability vectors under the
    information metric: 2 * arccos(sum sqrt(p*q)).

    Computed literally through the square-root embedding, so it coincides
    bit for bit with the great-circle arc between the embedded points.
    """
    p = _validate_prob(p, "p")
    q = _validate_prob(q, "q")
    if p.size != q.size:
        raise ValidationError("p and q must have the same number of atoms")
    u = 2.0 * np.sqrt(p)
    v = 2.0 * np.sqrt(q)
    c = float(u @ v) / 4.0
    return 2.0 * math.acos(min(1.0, max(-1.0, c)))


def kl_divergence(p, q) -> float:
    """Relative entropy sum(p * log(p/q)), natural logarithm."""
    p = _validate_prob(p, "p")
    q = _validate_prob(q, "q")
    if p.size != q.size:
        raise ValidationError("p and q must have the same number of atoms")
    return float(np.sum(p * (np.log(p) - np.log(q))))


class FisherSimplexSpace(_SampledMeasureMixin, MetricMeasureSpace):
    """Open probability simplex on ``num_atoms`` atoms with the information
    metric.  The square-root embedding identifies it with the positive orthant
    of the radius-2 sphere, so distances are spherical arcs and the reference
    measure is the induced (information-metric) volume, sampled by a
    symmetric Dirichlet(1/2) draw.
    """

    def __init__(self, num_atoms, mc_seed=0):
        if num_atoms < 2:
            raise ValidationError("num_atoms must be >= 2")
        self.num_atoms = int(num_atoms)
        self.mc_seed = int(mc_seed)
        k = self.num_atoms
        curvature = 0.25  # sphere of radius 2
        self.cd_data = CurvatureDimensionData(
            K=(k - 2) * curvature,
            N=float(k - 1),
            D=math.pi,
            topological_dim=k - 1,
        )

    def distance(self, x, y):
        return fisher_distance(x, y)

    def distance_to_many(self, x, pts):
        x = _validate_prob(x, "x")
        c = np.sqrt(np.asarray(pts, dtype=np.float64) * x).sum(axis=1)
        return 2.0 * np.arccos(np.clip(c, -1.0, 1.0))

    def sample(self, count, seed):
        if count < 1:
            raise ValidationError("sample count must be >= 1")
        rng = _as_rng(seed)
        pts = rng.dirichlet(np.full(self.num_atoms, 0.5), size=count)
        # Dirichlet(1/2) mass piles up at the boundary; redraw underflows
        for _ in range(100):
            bad = np.where(pts.min(axis=1) < 1e-12)[0]
            if bad.size == 0:
                break
            pts[bad] = rng.dirichlet(np.full(self.num_atoms, 0.5), size=bad.size)
        return pts

    def sample_weights(self, pts):
        return np.full(len(pts), self.total_measure() / len(pts))

    def total_measure(self):
        # area of the open orthant of the radius-2 sphere S^(k-1)
        k = self.num_atoms
        return math.pi ** (k / 2.0) / math.gamma(k / 2.0)

    def base_point(self):
        return np.full(self.num_atoms, 1.0 / self.num_atoms)

    def domain_diameter(self):
        return math.pi

    def kernel_payload(self, pts):
        u = 2.0 * np.sqrt(np.ascontiguousarray(pts, dtype=np.float64))
        return kernels.KIND_SPHERE, u, 2.0

    def mesh_coordinates(self, pts):
        if self.num_atoms == 3:
            return 2.0 * np.sqrt(np.asarray(pts, dtype=np.float64))
        return None


# ---------------------------------------------------------------------------
# JSON space specifications

def load_space(spec, base_dir=None) -> MetricMeasureSpace:
    """Build a space from a specification dict or a JSON file path.

    ``{"type": "sphere"|"euclidean"|"hyperbolic"|"weighted"|"pointcloud"|"fisher", ...}``
    with kind-specific fields: dim, curvature, extent, log_density (preset
    name), matrix/weights (CSV paths, relative to the spec file), num_atoms,
    and optional K/N/D overrides plus mc_seed.
    """
    if isinstance(spec, (str, Path)):
        path = Path(spec)
        base_dir = path.parent
        try:
            spec = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read space spec {path}: {exc}") from exc
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValidationError("space spec must be an object with a 'type' field")
    kind = spec["type"]
    common = {k: spec[k] for k in ("K", "N", "D", "mc_seed") if k in spec}
    try:
        if kind in ("euclidean", "sphere", "hyperbolic"):
            return ModelSpace(
                kind,
                spec["dim"],
                curvature=spec.get("curvature", 0.0),
                extent=spec.get("extent"),
                **common,
            )
        if kind == "weighted":
            return WeightedSpace(
                spec["dim"],
                spec["extent"],
                spec.get("log_density", "zero"),
                K=spec["K"],
                N=spec["N"],
                D=spec.get("D"),
                normalization=spec.get("normalization"),
                mc_seed=spec.get("mc_seed", 0),
            )
        if kind == "pointcloud":
            base = Path(base_dir) if base_dir is not None else Path(".")
            wpath = spec.get("weights")
            return PointCloudSpace.from_csv(
                base / spec["matrix"],
                base / wpath if wpath else None,
                **{k: spec[k] for k in ("K", "N", "D") if k in spec},
            )
        if kind == "fisher":
            return FisherSimplexSpace(spec["num_atoms"], mc_seed=spec.get("mc_seed", 0))
    except KeyError as exc:
        raise ValidationError(f"space spec of type {kind!r} is missing field {exc}") from exc
    raise ValidationError(f"unknown space type {kind!r}")
