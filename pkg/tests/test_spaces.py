import json
import math

import numpy as np
import pytest

from mmtri import (
    CurvatureDimensionData,
    FisherSimplexSpace,
    ModelSpace,
    PointCloudSpace,
    ValidationError,
    WeightedSpace,
    fisher_distance,
    fisher_embed,
    kl_divergence,
    load_space,
    model_ball_volume,
)
from mmtri.errors import DomainError

from _oracles import fisher_path_length


# ---------------------------------------------------------------------------
# curvature-dimension data

def test_cd_data_validation():
    CurvatureDimensionData(K=1.0, N=2.0, D=np.pi, topological_dim=2)
    with pytest.raises(ValidationError):
        CurvatureDimensionData(K=0.0, N=1.5, D=1.0, topological_dim=2)  # N < n
    with pytest.raises(ValidationError):
        CurvatureDimensionData(K=0.0, N=2.0, D=-1.0, topological_dim=2)
    with pytest.raises(ValidationError):
        # D beyond the K > 0 comparison domain pi*sqrt((N-1)/K)
        CurvatureDimensionData(K=1.0, N=2.0, D=3.5, topological_dim=2)


# ---------------------------------------------------------------------------
# model ball volumes (analytic oracles)

def test_ball_volume_euclidean_unit_disk(plane10):
    assert model_ball_volume(plane10, 1.0) == pytest.approx(np.pi, rel=1e-12)


def test_ball_volume_sphere_caps(unit_sphere):
    for r in (0.3, 1.0, 2.0, np.pi):
        assert model_ball_volume(unit_sphere, r) == pytest.approx(
            2 * np.pi * (1 - np.cos(r)), rel=1e-12
        )
    assert model_ball_volume(unit_sphere, np.pi) == pytest.approx(4 * np.pi, rel=1e-12)
    with pytest.raises(DomainError):
        model_ball_volume(unit_sphere, np.pi + 0.01)


def test_ball_volume_hyperbolic(hyperbolic3):
    # integral of the sinh density: 2 pi (cosh r - 1)
    assert model_ball_volume(hyperbolic3, 1.0) == pytest.approx(
        2 * np.pi * (np.cosh(1.0) - 1.0), rel=1e-12
    )


def test_ball_volume_dim3_quadrature_vs_analytic():
    ball3 = ModelSpace("euclidean", 3, extent=4.0)
    assert model_ball_volume(ball3, 1.5) == pytest.approx(4 / 3 * np.pi * 1.5**3, rel=1e-12)
    sphere3 = ModelSpace("sphere", 3, curvature=1.0)
    for r in (0.5, 1.2, 2.5):
        exact = 4 * np.pi * (r / 2 - np.sin(2 * r) / 4)  # area(S^2) * int sin^2
        assert model_ball_volume(sphere3, r) == pytest.approx(exact, rel=1e-10)


def test_circle_ball_is_arc_length(circle):
    assert model_ball_volume(circle, 1.0) == pytest.approx(2.0, rel=1e-12)
    assert circle.total_measure() == pytest.approx(2 * np.pi, rel=1e-12)


# ---------------------------------------------------------------------------
# metric axioms on sampled triples

@pytest.mark.parametrize("kind", ["euclidean", "sphere", "hyperbolic"])
def test_triangle_inequality_models(kind):
    space = {
        "euclidean": ModelSpace("euclidean", 3, extent=4.0),
        "sphere": ModelSpace("sphere", 2, curvature=2.0),
        "hyperbolic": ModelSpace("hyperbolic", 2, curvature=-0.5, extent=3.0),
    }[kind]
    pts = space.sample(300, 7)
    rng = np.random.default_rng(8)
    for _ in range(500):
        i, j, k = rng.integers(0, len(pts), 3)
        dij = space.distance(pts[i], pts[j])
        dik = space.distance(pts[i], pts[k])
        dkj = space.distance(pts[k], pts[j])
        assert dij <= dik + dkj + 1e-10
        assert dij >= 0.0
    assert space.distance(pts[0], pts[0]) == pytest.approx(0.0, abs=1e-9)


def test_sphere_distance_bounded_by_diameter():
    sp = ModelSpace("sphere", 2, curvature=4.0)  # radius 1/2
    pts = sp.sample(500, 3)
    d = sp.distance_to_many(pts[0], pts)
    assert d.max() <= np.pi * 0.5 + 1e-12


# ---------------------------------------------------------------------------
# Monte-Carlo measures against closed forms

@pytest.mark.parametrize(
    "space,r",
    [
        (ModelSpace("euclidean", 2, extent=2.0), 0.8),
        (ModelSpace("sphere", 2, curvature=1.0), np.pi / 2),
        (ModelSpace("hyperbolic", 2, curvature=-1.0, extent=3.0), 2.0),
    ],
)
def test_mc_ball_measure_converges(space, r):
    budget = 100_000
    exact = model_ball_volume(space, r)
    est = space.ball_measure(space.base_point(), r, budget)
    assert abs(est - exact) / exact < 3.0 / math.sqrt(budget)


def test_mc_ball_measure_monotone_in_radius(plane10):
    vals = [plane10.ball_measure(plane10.base_point(), r, 20_000) for r in np.linspace(0.5, 4, 12)]
    assert np.all(np.diff(vals) >= 0)


def test_closed_form_requires_containment(plane10):
    with pytest.raises(DomainError):
        plane10.ball_measure(np.array([4.9, 0.0]), 1.0)  # pokes out of the cube


def test_sampling_deterministic(plane10):
    a = plane10.sample(100, 42)
    b = plane10.sample(100, 42)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# weighted spaces

def test_weighted_zero_density_matches_unweighted():
    w = WeightedSpace(2, 4.0, "zero", K=0.0, N=2.0)
    plain = ModelSpace("euclidean", 2, extent=4.0)
    r, budget = 1.2, 50_000
    assert w.ball_measure(w.base_point(), r, budget) == pytest.approx(
        plain.ball_measure(plain.base_point(), r, budget), rel=0.02
    )


def test_weighted_gaussian_weights_formula():
    w = WeightedSpace(2, 6.0, "gaussian", K=0.0, N=2.0)
    pts = w.sample(1000, 5)
    weights = w.sample_weights(pts)
    expected = np.exp(-np.sum(pts**2, axis=1)) / (2 * np.pi) * (6.0**2 / 1000)
    assert np.allclose(weights, expected, rtol=1e-12)
    # mass concentrates near the origin: ball at 0 beats an off-center ball
    near = w.ball_measure(np.zeros(2), 1.0, 50_000)
    far = w.ball_measure(np.array([2.0, 2.0]), 1.0, 50_000)
    assert near > 5 * far


def test_weighted_log_density_must_be_finite():
    w = WeightedSpace(1, 2.0, lambda x: np.where(np.asarray(x)[..., 0] > 0, -np.inf, 0.0),
                      K=0.0, N=1.0)
    with pytest.raises(ValidationError):
        w.sample_weights(w.sample(10, 0))


# ---------------------------------------------------------------------------
# point clouds

def test_pointcloud_triangle_violation_rejected():
    D = np.array([[0.0, 1.0, 3.0], [1.0, 0.0, 1.0], [3.0, 1.0, 0.0]])
    with pytest.raises(ValidationError):
        PointCloudSpace(D)


def test_pointcloud_roundtrip(quarter_circle_cloud):
    pc = quarter_circle_cloud
    assert pc.distance(0, 2) == pytest.approx(np.pi)
    assert pc.total_measure() == 4.0
    assert pc.ball_measure(0, np.pi / 2) == 3.0  # itself plus two neighbours


def test_pointcloud_csv_loaders(tmp_path):
    full = tmp_path / "full.csv"
    full.write_text("0,1,2\n1,0,1.5\n2,1.5,0\n")
    tri = tmp_path / "tri.csv"
    tri.write_text("0\n1,0\n2,1.5,0\n")
    a = PointCloudSpace.from_csv(full)
    b = PointCloudSpace.from_csv(tri)
    assert np.allclose(a.matrix, b.matrix)


# ---------------------------------------------------------------------------
# information-geometry operations

def test_fisher_embed_examples():
    u = fisher_embed([0.5, 0.5])
    assert u == pytest.approx([math.sqrt(2), math.sqrt(2)], rel=1e-15)
    u = fisher_embed([0.25, 0.75])
    assert u == pytest.approx([1.0, math.sqrt(3)], rel=1e-15)
    assert np.sum(u * u) == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(ValidationError):
        fisher_embed([1.0, 0.0])  # boundary
    with pytest.raises(ValidationError):
        fisher_embed([0.5, 0.4])  # not normalized


def test_fisher_distance_examples():
    assert fisher_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
    expected = 2 * math.acos(2 * math.sqrt(0.09))
    assert fisher_distance([0.9, 0.1], [0.1, 0.9]) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(2 * math.acos(0.6), rel=1e-15)


def test_fisher_distance_equals_embedded_arc():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = rng.dirichlet(np.ones(4))
        q = rng.dirichlet(np.ones(4))
        if p.min() < 1e-9 or q.min() < 1e-9:
            continue
        u, v = fisher_embed(p), fisher_embed(q)
        arc = 2.0 * math.acos(min(1.0, float(u @ v) / 4.0))
        assert fisher_distance(p, q) == pytest.approx(arc, abs=1e-12)


def test_fisher_triangle_inequality_bulk():
    rng = np.random.default_rng(1)
    pts = rng.dirichlet(np.ones(3), size=300)
    pts = pts[pts.min(axis=1) > 1e-6]
    n = len(pts)
    idx = rng.integers(0, n, size=(10_000, 3))
    for i, j, k in idx:
        dij = fisher_distance(pts[i], pts[j])
        assert dij <= fisher_distance(pts[i], pts[k]) + fisher_distance(pts[k], pts[j]) + 1e-12


def test_fisher_path_minimization_oracle():
    rng = np.random.default_rng(2)
    for k in (2, 3):
        for _ in range(2):
            p = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
            q = rng.dirichlet(np.ones(k)) * 0.9 + 0.1 / k
            p, q = p / p.sum(), q / q.sum()
            assert fisher_distance(p, q) == pytest.approx(
                fisher_path_length(p, q), abs=1e-4
            )


def test_kl_examples():
    assert kl_divergence([0.5, 0.5], [0.5, 0.5]) == 0.0
    expected = 0.5 * math.log(2) + 0.5 * math.log(2 / 3)
    assert kl_divergence([0.5, 0.5], [0.25, 0.75]) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.1438, abs=5e-5)
    # asymmetry
    assert kl_divergence([0.5, 0.5], [0.25, 0.75]) != kl_divergence([0.25, 0.75], [0.5, 0.5])


def test_kl_nonnegative_random():
    rng = np.random.default_rng(3)
    for _ in range(300):
        p = rng.dirichlet(np.ones(5)) + 1e-6
        q = rng.dirichlet(np.ones(5)) + 1e-6
        p, q = p / p.sum(), q / q.sum()
        assert kl_divergence(p, q) >= -1e-15


def test_fisher_space_sampling_interior(fisher3):
    pts = fisher3.sample(2000, 9)
    assert pts.min() > 0
    assert np.allclose(pts.sum(axis=1), 1.0, atol=1e-12)
    # spherical arc distances, symmetric
    d_ab = fisher3.distance(pts[0], pts[1])
    d_ba = fisher3.distance(pts[1], pts[0])
    assert d_ab == pytest.approx(d_ba, abs=1e-15)


def test_fisher_space_total_measure_is_orthant_area(fisher3):
    # area of the positive orthant of the radius-2 sphere in R^3:
    # (1/8) * 4 pi * 2^2 = 2 pi
    assert fisher3.total_measure() == pytest.approx(2 * np.pi, rel=1e-12)


# ---------------------------------------------------------------------------
# JSON specs

def test_load_space_types(tmp_path):
    for spec, cls in [
        ({"type": "euclidean", "dim": 2, "extent": 5.0}, ModelSpace),
        ({"type": "sphere", "dim": 2, "curvature": 1.0}, ModelSpace),
        ({"type": "hyperbolic", "dim": 2, "curvature": -1.0, "extent": 4.0}, ModelSpace),
        ({"type": "weighted", "dim": 2, "extent": 5.0, "log_density": "gaussian",
          "K": 0.0, "N": 2.0}, WeightedSpace),
        ({"type": "fisher", "num_atoms": 4}, FisherSimplexSpace),
    ]:
        assert isinstance(load_space(spec), cls)
    mat = tmp_path / "m.csv"
    mat.write_text("0,1\n1,0\n")
    path = tmp_path / "space.json"
    path.write_text(json.dumps({"type": "pointcloud", "matrix": "m.csv"}))
    assert isinstance(load_space(path), PointCloudSpace)
    with pytest.raises(ValidationError):
        load_space({"type": "nope"})
    with pytest.raises(ValidationError):
        load_space({"type": "euclidean", "dim": 2})  # extent missing


def test_declared_overrides():
    sp = load_space({"type": "euclidean", "dim": 2, "extent": 4.0, "K": 0.0, "N": 3.0})
    assert sp.cd_data.N == 3.0
    assert sp.cd_data.topological_dim == 2
