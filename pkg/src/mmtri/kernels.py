"""Hot numeric kernels: greedy net admission, nearest-center assignment, BFS.

Every kernel comes in two flavours selected by :mod:`mmtri._accel`:

* ``*_nb`` -- explicit loops compiled with ``numba.njit(cache=True)``;
* ``*_np`` -- vectorized numpy, used when numba is disabled or missing.

Both flavours implement the same admission order and tie-break rules, so the
selected centers, assignments and BFS levels are identical across backends.

Metric dispatch is by integer kind so the compiled kernels stay monomorphic:

====  =========================================================
kind  coords layout / distance
====  =========================================================
0     euclidean rows; ``|x - y|``
1     rows on a sphere of radius ``param`` embedded in R^(d+1);
      geodesic ``param * arccos(<x,y>/param^2)``
2     rows in the unit Poincare ball, curvature scale ``param``;
      ``param * arccosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2)))``
3     ``coords`` is a full precomputed distance matrix
====  =========================================================
"""

import math

import numpy as np

from ._accel import NUMBA_ENABLED, njit

KIND_EUCLIDEAN = 0
KIND_SPHERE = 1
KIND_POINCARE = 2
KIND_PRECOMPUTED = 3


# ---------------------------------------------------------------------------
# scalar / row distance helpers

@njit
def _dist_nb(kind, coords, param, i, j):
    if kind == 3:
        return coords[i, j]
    d = coords.shape[1]
    if kind == 0:
        s = 0.0
        for k in range(d):
            t = coords[i, k] - coords[j, k]
            s += t * t
        return math.sqrt(s)
    if kind == 1:
        dot = 0.0
        for k in range(d):
            dot += coords[i, k] * coords[j, k]
        c = dot / (param * param)
        if c > 1.0:
            c = 1.0
        elif c < -1.0:
            c = -1.0
        return param * math.acos(c)
    # kind == 2
    ss = 0.0
    ni = 0.0
    nj = 0.0
    for k in range(d):
        t = coords[i, k] - coords[j, k]
        ss += t * t
        ni += coords[i, k] * coords[i, k]
        nj += coords[j, k] * coords[j, k]
    arg = 1.0 + 2.0 * ss / ((1.0 - ni) * (1.0 - nj))
    if arg < 1.0:
        arg = 1.0
    return param * math.log(arg + math.sqrt(arg * arg - 1.0))


def _dist_row_np(kind, coords, param, i):
    """Distances from point ``i`` to every row (numpy backend)."""
    if kind == KIND_PRECOMPUTED:
        return coords[i].astype(np.float64, copy=True)
    if kind == KIND_EUCLIDEAN:
        diff = coords - coords[i]
        return np.sqrt(np.sum(diff * diff, axis=1))
    if kind == KIND_SPHERE:
        c = coords @ coords[i] / (param * param)
        return param * np.arccos(np.clip(c, -1.0, 1.0))
    # Poincare ball
    diff = coords - coords[i]
    ss = np.sum(diff * diff, axis=1)
    norms = np.sum(coords * coords, axis=1)
    arg = 1.0 + 2.0 * ss / ((1.0 - norms[i]) * (1.0 - norms))
    np.maximum(arg, 1.0, out=arg)
    return param * np.arccosh(arg)


@njit
def _dist_row_into_nb(kind, coords, param, i, out):
    for j in range(coords.shape[0]):
        out[j] = _dist_nb(kind, coords, param, i, j)


def dist_row(kind, coords, param, i):
    """Distances from row ``i`` of ``coords`` to every row."""
    if NUMBA_ENABLED:
        out = np.empty(coords.shape[0], dtype=np.float64)
        _dist_row_into_nb(kind, coords, param, i, out)
        return out
    return _dist_row_np(kind, coords, param, i)


# ---------------------------------------------------------------------------
# greedy maximal separated subset

@njit
def _greedy_net_nb(kind, coords, param, order, eps):
    m = coords.shape[0]
    dmin = np.full(m, np.inf)
    centers = np.empty(m, dtype=np.int64)
    n0 = 0
    for t in range(order.shape[0]):
        idx = order[t]
        if dmin[idx] >= eps:
            centers[n0] = idx
            n0 += 1
            for j in range(m):
                d = _dist_nb(kind, coords, param, idx, j)
                if d < dmin[j]:
                    dmin[j] = d
    return centers[:n0], dmin


def _greedy_net_np(kind, coords, param, order, eps):
    m = coords.shape[0]
    dmin = np.full(m, np.inf)
    centers = []
    for idx in order:
        if dmin[idx] >= eps:
            centers.append(idx)
            np.minimum(dmin, _dist_row_np(kind, coords, param, idx), out=dmin)
    return np.asarray(centers, dtype=np.int64), dmin


def greedy_net(kind, coords, param, order, eps):
    """Scan ``order``; admit a point iff it is >= eps from all admitted points.

    Returns ``(centers, dmin)`` where ``dmin[j]`` is the distance from sample
    point ``j`` to its nearest admitted center (the covering profile).
    """
    order = np.ascontiguousarray(order, dtype=np.int64)
    if NUMBA_ENABLED:
        return _greedy_net_nb(kind, coords, param, order, float(eps))
    return _greedy_net_np(kind, coords, param, order, float(eps))


# ---------------------------------------------------------------------------
# farthest-point admission (lower covering radii than random order)

@njit
def _farthest_net_nb(kind, coords, param, start, eps):
    m = coords.shape[0]
    centers = np.empty(m, dtype=np.int64)
    centers[0] = start
    n0 = 1
    dmin = np.empty(m, dtype=np.float64)
    _dist_row_into_nb(kind, coords, param, start, dmin)
    while True:
        best = 0
        bestd = dmin[0]
        for j in range(1, m):
            if dmin[j] > bestd:
                bestd = dmin[j]
                best = j
        if bestd < eps:
            break
        centers[n0] = best
        n0 += 1
        for j in range(m):
            d = _dist_nb(kind, coords, param, best, j)
            if d < dmin[j]:
                dmin[j] = d
    return centers[:n0], dmin


def _farthest_net_np(kind, coords, param, start, eps):
    centers = [int(start)]
    dmin = _dist_row_np(kind, coords, param, int(start))
    while True:
        best = int(np.argmax(dmin))
        if dmin[best] < eps:
            break
        centers.append(best)
        np.minimum(dmin, _dist_row_np(kind, coords, param, best), out=dmin)
    return np.asarray(centers, dtype=np.int64), dmin


def farthest_net(kind, coords, param, start, eps):
    """Farthest-point insertion until the covering radius drops below eps."""
    if NUMBA_ENABLED:
        return _farthest_net_nb(kind, coords, param, int(start), float(eps))
    return _farthest_net_np(kind, coords, param, int(start), float(eps))


# ---------------------------------------------------------------------------
# pairwise distances for a subset of rows

@njit
def _pairwise_nb(kind, coords, param, idx):
    k = idx.shape[0]
    out = np.zeros((k, k), dtype=np.float64)
    for a in range(k):
        for b in range(a + 1, k):
            d = _dist_nb(kind, coords, param, idx[a], idx[b])
            out[a, b] = d
            out[b, a] = d
    return out

def _pairwise_np(kind, coords, param, idx):
    k = idx.shape[0]
    sub = np.ascontiguousarray(coords[idx])
    out = np.zeros((k, k), dtype=np.float64)
    for a in range(k):
        out[a] = _dist_row_np(kind, sub, param, a)
    np.fill_diagonal(out, 0.0)
    # mirror the upper triangle like the loop version
    iu = np.triu_indices(k, 1)
    out[(iu[1], iu[0])] = out[iu]
    return out


def pairwise_distances(kind, coords, param, idx):
    """Symmetric matrix of distances between the rows listed in ``idx``."""
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    if NUMBA_ENABLED:
        return _pairwise_nb(kind, coords, param, idx)
    if kind == KIND_PRECOMPUTED:
        return coords[np.ix_(idx, idx)].astype(np.float64)
    return _pairwise_np(kind, coords, param, idx)


# ---------------------------------------------------------------------------
# nearest-center (Dirichlet cell) assignment

@njit
def _nearest_center_nb(kind, coords, param, centers):
    m = coords.shape[0]
    assign = np.empty(m, dtype=np.int64)
    dist = np.full(m, np.inf)
    for c in range(centers.shape[0]):
        ci = centers[c]
        for j in range(m):
            d = _dist_nb(kind, coords, param, ci, j)
            if d < dist[j]:
                dist[j] = d
                assign[j] = c
    return assign, dist


def _nearest_center_np(kind, coords, param, centers):
    m = coords.shape[0]
    assign = np.zeros(m, dtype=np.int64)
    dist = np.full(m, np.inf)
    for c, ci in enumerate(centers):
        d = _dist_row_np(kind, coords, param, int(ci))
        closer = d < dist
        assign[closer] = c
        dist[closer] = d[closer]
    return assign, dist


def nearest_center(kind, coords, param, centers):
    """Assign every row to its nearest center; ties keep the earliest center.

    ``centers`` holds row indices; the returned assignment holds positions in
    ``centers`` (0-based).  The strict ``<`` update makes the lowest-position
    center win ties in both backends.
    """
    centers = np.ascontiguousarray(centers, dtype=np.int64)
    if NUMBA_ENABLED:
        return _nearest_center_nb(kind, coords, param, centers)
    return _nearest_center_np(kind, coords, param, centers)


# ---------------------------------------------------------------------------
# unweighted BFS on CSR adjacency

@njit
def _bfs_nb(indptr, indices, source, n):
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v]
        for p in range(indptr[v], indptr[v + 1]):
            w = indices[p]
            if dist[w] < 0:
                dist[w] = dv + 1
                queue[tail] = w
                tail += 1
    return dist


def _bfs_np(indptr, indices, source, n):
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        offsets = np.repeat(starts - np.concatenate(([0], np.cumsum(counts)[:-1])), counts)
        nbrs = indices[np.arange(total) + offsets]
        nbrs = np.unique(nbrs[dist[nbrs] < 0])
        level += 1
        dist[nbrs] = level
        frontier = nbrs
    return dist


def bfs_levels(indptr, indices, source):
    """Hop distances from ``source``; -1 marks unreachable vertices."""
    n = indptr.shape[0] - 1
    if NUMBA_ENABLED:
        return _bfs_nb(indptr, indices, int(source), n)
    return _bfs_np(indptr, indices, int(source), n)


# ---------------------------------------------------------------------------
# all pairs of subset rows closer than a threshold (intersection pattern)

@njit
def _radius_edges_nb(kind, coords, param, idx, threshold):
    k = idx.shape[0]
    count = 0
    min_d = np.inf
    for a in range(k):
        for b in range(a + 1, k):
            d = _dist_nb(kind, coords, param, idx[a], idx[b])
            if d < min_d:
                min_d = d
            if d < threshold:
                count += 1
    edges = np.empty((count, 2), dtype=np.int64)
    pos = 0
    for a in range(k):
        for b in range(a + 1, k):
            if _dist_nb(kind, coords, param, idx[a], idx[b]) < threshold:
                edges[pos, 0] = a
                edges[pos, 1] = b
                pos += 1
    return edges, min_d


def _radius_edges_np(kind, coords, param, idx, threshold):
    k = idx.shape[0]
    sub = np.ascontiguousarray(coords[idx]) if kind != KIND_PRECOMPUTED else coords[np.ix_(idx, idx)]
    rows = []
    min_d = np.inf
    for a in range(k - 1):
        d = _dist_row_np(kind, sub, param, a)[a + 1 :]
        if d.size:
            min_d = min(min_d, float(d.min()))
        hits = np.nonzero(d < threshold)[0]
        if hits.size:
            rows.append(np.column_stack((np.full(hits.size, a, dtype=np.int64), hits + a + 1)))
    if rows:
        edges = np.concatenate(rows)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return edges, min_d


def radius_edges(kind, coords, param, idx, threshold):
    """Lexicographically ordered pairs (a, b), a < b, of subset positions with
    d < threshold, plus the minimum pairwise distance over the subset."""
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    if NUMBA_ENABLED:
        return _radius_edges_nb(kind, coords, param, idx, float(threshold))
    return _radius_edges_np(kind, coords, param, idx, float(threshold))


# ---------------------------------------------------------------------------
# distances for explicit index pairs

@njit
def _pairs_distances_nb(kind, coords, param, ii, jj):
    out = np.empty(ii.shape[0], dtype=np.float64)
    for t in range(ii.shape[0]):
        out[t] = _dist_nb(kind, coords, param, ii[t], jj[t])
    return out


def _pairs_distances_np(kind, coords, param, ii, jj):
    if kind == KIND_PRECOMPUTED:
        return coords[ii, jj].astype(np.float64)
    a = coords[ii]
    b = coords[jj]
    if kind == KIND_EUCLIDEAN:
        diff = a - b
        return np.sqrt(np.sum(diff * diff, axis=1))
    if kind == KIND_SPHERE:
        c = np.sum(a * b, axis=1) / (param * param)
        return param * np.arccos(np.clip(c, -1.0, 1.0))
    diff = a - b
    ss = np.sum(diff * diff, axis=1)
    na = np.sum(a * a, axis=1)
    nb_ = np.sum(b * b, axis=1)
    arg = 1.0 + 2.0 * ss / ((1.0 - na) * (1.0 - nb_))
    return param * np.arccosh(np.maximum(arg, 1.0))


def pairs_distances(kind, coords, param, ii, jj):
    """Distances between rows ii[t] and jj[t]."""
    ii = np.ascontiguousarray(ii, dtype=np.int64)
    jj = np.ascontiguousarray(jj, dtype=np.int64)
    if NUMBA_ENABLED:
        return _pairs_distances_nb(kind, coords, param, ii, jj)
    return _pairs_distances_np(kind, coords, param, ii, jj)


# ---------------------------------------------------------------------------
# triangle inequality audit for loaded distance matrices

@njit
def _triangle_violation_nb(D, tol):
    n = D.shape[0]
    for k in range(n):
        for i in range(n):
            dik = D[i, k]
            for j in range(n):
                if D[i, j] > dik + D[k, j] + tol:
                    return i, j, k
    return -1, -1, -1


def _triangle_violation_np(D, tol):
    n = D.shape[0]
    for k in range(n):
        slack = D - (D[:, k][:, None] + D[k, :][None, :])
        i, j = np.unravel_index(np.argmax(slack), slack.shape)
        if slack[i, j] > tol:
            return int(i), int(j), int(k)
    return -1, -1, -1


def triangle_violation(D, tol=1e-12):
    """First triple (i, j, k) with D[i,j] > D[i,k] + D[k,j] + tol, or (-1,-1,-1)."""
    D = np.ascontiguousarray(D, dtype=np.float64)
    if NUMBA_ENABLED:
        return _triangle_violation_nb(D, tol)
    return _triangle_violation_np(D, tol)


# ---------------------------------------------------------------------------
# counts of rows within each radius of a fixed row (Monte-Carlo ball measures)

@njit
def _count_within_nb(kind, coords, param, i, radii):
    m = coords.shape[0]
    counts = np.zeros(radii.shape[0], dtype=np.int64)
    for j in range(m):
        d = _dist_nb(kind, coords, param, i, j)
        for r in range(radii.shape[0]):
            if d <= radii[r]:
                counts[r] += 1
    return counts


def _count_within_np(kind, coords, param, i, radii):
    d = _dist_row_np(kind, coords, param, i)
    return np.array([(d <= r).sum() for r in radii], dtype=np.int64)


def count_within(kind, coords, param, i, radii):
    """Number of rows within each radius of row ``i`` (closed balls)."""
    radii = np.ascontiguousarray(radii, dtype=np.float64)
    if NUMBA_ENABLED:
        return _count_within_nb(kind, coords, param, int(i), radii)
    return _count_within_np(kind, coords, param, int(i), radii)
