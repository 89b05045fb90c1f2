"""Backend equivalence: every numba kernel must reproduce its numpy twin."""

import numpy as np
import pytest

from mmtri import kernels
from mmtri._accel import NUMBA_ENABLED

pytestmark = pytest.mark.skipif(
    not NUMBA_ENABLED, reason="numba disabled; single backend in play"
)


def payloads():
    rng = np.random.default_rng(40)
    euclid = rng.uniform(-2, 2, size=(400, 3))
    g = rng.standard_normal((400, 3))
    sphere = 1.5 * g / np.linalg.norm(g, axis=1, keepdims=True)
    disk = rng.uniform(-0.6, 0.6, size=(400, 2))
    disk = disk[np.sum(disk * disk, axis=1) < 0.8]
    pts = rng.uniform(0, 1, size=(60, 2))
    diff = pts[:, None, :] - pts[None, :, :]
    matrix = np.sqrt(np.sum(diff * diff, axis=2))
    return [
        (kernels.KIND_EUCLIDEAN, euclid, 0.0),
        (kernels.KIND_SPHERE, sphere, 1.5),
        (kernels.KIND_POINCARE, disk, 1.0),
        (kernels.KIND_PRECOMPUTED, matrix, 0.0),
    ]


@pytest.mark.parametrize("kind,coords,param", payloads())
def test_greedy_net_backends_agree(kind, coords, param):
    order = np.random.default_rng(41).permutation(len(coords))
    eps = 0.5 if kind != kernels.KIND_SPHERE else 0.8
    c_nb, d_nb = kernels._greedy_net_nb(kind, coords, param, order, eps)
    c_np, d_np = kernels._greedy_net_np(kind, coords, param, order, eps)
    assert np.array_equal(c_nb, c_np)
    # arccos near 1 turns 1-ulp dot differences into sqrt(ulp) ~ 3e-8 jitter
    assert np.allclose(d_nb, d_np, rtol=1e-12, atol=1e-7)


@pytest.mark.parametrize("kind,coords,param", payloads())
def test_farthest_net_backends_agree(kind, coords, param):
    eps = 0.5 if kind != kernels.KIND_SPHERE else 0.8
    c_nb, d_nb = kernels._farthest_net_nb(kind, coords, param, 3, eps)
    c_np, d_np = kernels._farthest_net_np(kind, coords, param, 3, eps)
    assert np.array_equal(c_nb, c_np)
    # arccos near 1 turns 1-ulp dot differences into sqrt(ulp) ~ 3e-8 jitter
    assert np.allclose(d_nb, d_np, rtol=1e-12, atol=1e-7)


@pytest.mark.parametrize("kind,coords,param", payloads())
def test_nearest_center_backends_agree(kind, coords, param):
    centers = np.array([0, 5, 11, 17], dtype=np.int64)
    a_nb, d_nb = kernels._nearest_center_nb(kind, coords, param, centers)
    a_np, d_np = kernels._nearest_center_np(kind, coords, param, centers)
    assert np.array_equal(a_nb, a_np)
    # arccos near +-1 amplifies 1-ulp dot differences between BLAS and loops
    assert np.allclose(d_nb, d_np, rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize("kind,coords,param", payloads())
def test_pairwise_and_pairs_backends_agree(kind, coords, param):
    idx = np.array([0, 3, 7, 12, 25], dtype=np.int64)
    p_nb = kernels._pairwise_nb(kind, coords, param, idx)
    if kind == kernels.KIND_PRECOMPUTED:
        p_np = coords[np.ix_(idx, idx)]
    else:
        p_np = kernels._pairwise_np(kind, coords, param, idx)
    assert np.allclose(p_nb, p_np, rtol=1e-13, atol=1e-14)
    ii = np.array([0, 1, 2, 8], dtype=np.int64)
    jj = np.array([9, 4, 2, 30], dtype=np.int64)
    assert np.allclose(
        kernels._pairs_distances_nb(kind, coords, param, ii, jj),
        kernels._pairs_distances_np(kind, coords, param, ii, jj),
        rtol=1e-13, atol=1e-14,
    )


@pytest.mark.parametrize("kind,coords,param", payloads())
def test_radius_edges_backends_agree(kind, coords, param):
    idx = np.arange(0, len(coords), 3, dtype=np.int64)
    thr = 0.7 if kind != kernels.KIND_SPHERE else 1.2
    e_nb, m_nb = kernels._radius_edges_nb(kind, coords, param, idx, thr)
    e_np, m_np = kernels._radius_edges_np(kind, coords, param, idx, thr)
    assert np.array_equal(e_nb, e_np)
    assert m_nb == pytest.approx(m_np, rel=1e-14)


def test_bfs_backends_agree():
    rng = np.random.default_rng(42)
    n = 80
    edges = np.array(
        [(i, j) for i in range(n) for j in range(i + 1, n) if rng.uniform() < 0.05],
        dtype=np.int64,
    )
    from mmtri.discretization import _csr

    indptr, indices, _ = _csr(edges, n)
    for src in (0, 17, 59):
        assert np.array_equal(
            kernels._bfs_nb(indptr, indices, src, n),
            kernels._bfs_np(indptr, indices, src, n),
        )


def test_count_within_backends_agree():
    kind, coords, param = payloads()[0]
    radii = np.array([0.3, 0.8, 1.5, 4.0])
    assert np.array_equal(
        kernels._count_within_nb(kind, coords, param, 2, radii),
        kernels._count_within_np(kind, coords, param, 2, radii),
    )


def test_triangle_violation_backends_agree():
    rng = np.random.default_rng(43)
    pts = rng.uniform(0, 1, size=(30, 3))
    diff = pts[:, None, :] - pts[None, :, :]
    D = np.sqrt(np.sum(diff * diff, axis=2))
    assert kernels._triangle_violation_nb(D, 1e-12) == (-1, -1, -1)
    assert kernels._triangle_violation_np(D, 1e-12) == (-1, -1, -1)
    D_bad = D.copy()
    D_bad[3, 7] = D_bad[7, 3] = 100.0
    i, j, k = kernels._triangle_violation_nb(D_bad, 1e-12)
    assert (i, j) in ((3, 7), (7, 3))
    i2, j2, k2 = kernels._triangle_violation_np(D_bad, 1e-12)
    assert (i2, j2) in ((3, 7), (7, 3))
