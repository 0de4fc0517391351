"""Time the numba kernels against the pure-NumPy fallback.

Both flavors run the same function body (see topoclass._kernels); this
script measures what the JIT actually buys on the two hot loops, the cyclic
Jacobi eigensolver and all-pairs Dijkstra.  Run from the repo root:

    python3 benchmarks/bench_kernels.py

Expect roughly a minute: the interpreted Jacobi sweep is the slow part, and
that slowness is the point being measured.
"""

import time

import numpy as np

from topoclass import _kernels
from topoclass.data import gen_annulus2d
from topoclass.isomap import knn_graph
from topoclass.numerics import make_rng


def time_call(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def jacobi_driver(sweep_fn, s, tol=1e-10, max_sweeps=60):
    a = s.copy()
    v = np.eye(a.shape[0])
    fro = np.sqrt((a * a).sum())
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = a.copy()
        np.fill_diagonal(off, 0.0)
        off_norm = np.sqrt((off * off).sum())
        if off_norm <= tol * fro:
            break
        sweep_fn(a, v, off_norm / (n * n))
    return np.diag(a)


def bench_jacobi(n):
    rng = make_rng(1)
    mat = rng.standard_normal((n, n))
    sym = (mat + mat.T) / 2.0

    if _kernels.jacobi_sweep_numba is not None:
        jacobi_driver(_kernels.jacobi_sweep_numba, sym[:4, :4])  # compile outside the clock
        t_numba, ev_numba = time_call(jacobi_driver, _kernels.jacobi_sweep_numba, sym)
    else:
        t_numba, ev_numba = float("nan"), None
    t_numpy, ev_numpy = time_call(jacobi_driver, _kernels.jacobi_sweep_numpy, sym, repeats=1)
    if ev_numba is not None:
        assert np.array_equal(np.sort(ev_numba), np.sort(ev_numpy)), "flavors disagree"
    return t_numba, t_numpy


def bench_dijkstra(n_points, k):
    cloud = gen_annulus2d(n_points // 2, 2)
    adj = knn_graph(cloud.points, k).weights

    if _kernels.dijkstra_all_pairs_numba is not None:
        _kernels.dijkstra_all_pairs_numba(adj[:4, :4])  # compile outside the clock
        t_numba, d_numba = time_call(_kernels.dijkstra_all_pairs_numba, adj)
    else:
        t_numba, d_numba = float("nan"), None
    t_numpy, d_numpy = time_call(_kernels.dijkstra_all_pairs_numpy, adj, repeats=1)
    if d_numba is not None:
        assert np.array_equal(d_numba, d_numpy), "flavors disagree"
    return t_numba, t_numpy


def main():
    print(f"active backend: {_kernels.BACKEND}")
    print(f"{'kernel':<28} {'numba':>10} {'numpy':>10} {'speedup':>9}")
    rows = [
        ("jacobi eigensolver 60x60", *bench_jacobi(60)),
        ("jacobi eigensolver 150x150", *bench_jacobi(150)),
        ("dijkstra all-pairs n=300", *bench_dijkstra(300, 10)),
        ("dijkstra all-pairs n=600", *bench_dijkstra(600, 10)),
    ]
    for name, t_numba, t_numpy in rows:
        speed = t_numpy / t_numba if t_numba == t_numba and t_numba > 0 else float("nan")
        print(f"{name:<28} {t_numba:>9.4f}s {t_numpy:>9.4f}s {speed:>8.1f}x")


if __name__ == "__main__":
    main()
