"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--samples 200000] [--eps 0.02]

Requires numba importable and MMTRI_NUMBA unset (or truthy); with numba
disabled the ``*_nb`` functions are plain Python loops and only the numpy
column is meaningful.
"""

import argparse
import time

import numpy as np

from mmtri import kernels
from mmtri._accel import NUMBA_ENABLED, backend_name
from mmtri.discretization import _csr


def timed(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--eps", type=float, default=0.02)
    args = parser.parse_args()

    print(f"backend selected by env: {backend_name()}")
    if not NUMBA_ENABLED:
        print("warning: numba disabled; the 'numba' column is uncompiled Python")

    rng = np.random.default_rng(0)
    coords = rng.uniform(-1.0, 1.0, size=(args.samples, 2))
    kind, param = kernels.KIND_EUCLIDEAN, 0.0
    order = rng.permutation(args.samples)

    rows = []

    # warm the JIT before timing
    kernels._greedy_net_nb(kind, coords[:500], param, order[order < 500], args.eps)
    t_nb, (centers, _) = timed(kernels._greedy_net_nb, kind, coords, param, order, args.eps, repeat=1)
    t_np, (centers_np, _) = timed(kernels._greedy_net_np, kind, coords, param, order, args.eps, repeat=1)
    assert np.array_equal(centers, centers_np)
    rows.append(("greedy_net", t_nb, t_np))

    kernels._nearest_center_nb(kind, coords[:500], param, centers[centers < 500][:4])
    t_nb, (assign, _) = timed(kernels._nearest_center_nb, kind, coords, param, centers, repeat=1)
    t_np, (assign_np, _) = timed(kernels._nearest_center_np, kind, coords, param, centers, repeat=1)
    assert np.array_equal(assign, assign_np)
    rows.append(("nearest_center", t_nb, t_np))

    threshold = 2.0 * args.eps - 1e-12
    kernels._radius_edges_nb(kind, coords, param, centers[:50], threshold)
    t_nb, (edges, _) = timed(kernels._radius_edges_nb, kind, coords, param, centers, threshold, repeat=1)
    t_np, (edges_np, _) = timed(kernels._radius_edges_np, kind, coords, param, centers, threshold, repeat=1)
    assert np.array_equal(edges, edges_np)
    rows.append(("radius_edges", t_nb, t_np))

    n = len(centers)
    indptr, indices, _ = _csr(edges, n)
    kernels._bfs_nb(indptr, indices, 0, n)
    t_nb, levels = timed(kernels._bfs_nb, indptr, indices, 0, n)
    t_np, levels_np = timed(kernels._bfs_np, indptr, indices, 0, n)
    assert np.array_equal(levels, levels_np)
    rows.append(("bfs_levels", t_nb, t_np))

    print(f"\n{args.samples} samples, {n} net centers, {len(edges)} edges, eps={args.eps}")
    print(f"{'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, t_nb, t_np in rows:
        print(f"{name:<16}{t_nb:>12.3f}{t_np:>12.3f}{t_np / t_nb:>10.1f}x")


if __name__ == "__main__":
    main()
