"""Hot numeric kernels, JIT-compiled with numba by default.

The kernel bodies are written once in numba-compatible NumPy and exported in
two flavors: ``*_numpy`` (the plain interpreted function) and ``*_numba``
(the same function wrapped in ``numba.njit``).  The active aliases used by
the rest of the package are chosen at import time from the environment
variable ``TOPOCLASS_BACKEND``:

    TOPOCLASS_BACKEND=numba   JIT-compiled kernels (default)
    TOPOCLASS_BACKEND=numpy   interpreted fallback, same code, same results

Both paths execute the identical statements in the identical order, so the
results are bit-for-bit equal; the flag trades speed only.  No other part of
the package reads environment variables.  ``benchmarks/bench_kernels.py``
times the two flavors side by side.
"""

import os

import numpy as np


def _pick_backend():
    choice = os.environ.get("TOPOCLASS_BACKEND", "numba").strip().lower()
    if choice not in ("numba", "numpy"):
        raise ValueError(
            f"TOPOCLASS_BACKEND must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numba":
        try:
            import numba  # noqa: F401
        except ImportError:
            choice = "numpy"
    return choice


BACKEND = _pick_backend()


def jacobi_sweep(a, v, skip):
    """One cyclic-by-row sweep of two-sided Jacobi rotations, in place.

    Rotates every off-diagonal pivot with |a[p, q]| > skip, accumulating the
    rotations into the column basis ``v``.  Returns the number of rotations
    applied; zero means the sweep found nothing above the threshold.
    """
    n = a.shape[0]
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p, q]
            if abs(apq) <= skip:
                continue
            rotations += 1
            diff = a[q, q] - a[p, p]
            # guard against overflow in diff / (2*apq) for tiny pivots
            if abs(apq) < abs(diff) * 1e-36:
                t = apq / diff
            else:
                theta = diff / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            rowp = a[p, :].copy()
            rowq = a[q, :].copy()
            a[p, :] = c * rowp - s * rowq
            a[q, :] = s * rowp + c * rowq
            colp = a[:, p].copy()
            colq = a[:, q].copy()
            a[:, p] = c * colp - s * colq
            a[:, q] = s * colp + c * colq
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp = v[:, p].copy()
            vq = v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
    return rotations


def dijkstra_all_pairs(adj):
    """All-pairs shortest paths on a dense weighted adjacency matrix.

    ``adj[i, j] > 0`` is the weight of edge (i, j); zero means no edge.
    Unreachable pairs come back as +inf (callers reject disconnected graphs
    before getting here).
    """
    n = adj.shape[0]
    out = np.empty((n, n), dtype=np.float64)
    for src in range(n):
        dist = np.full(n, np.inf)
        dist[src] = 0.0
        done = np.zeros(n, dtype=np.bool_)
        for _ in range(n):
            masked = np.where(done, np.inf, dist)
            u = int(np.argmin(masked))
            best = masked[u]
            if not np.isfinite(best):
                break
            done[u] = True
            row = adj[u, :]
            cand = np.where((row > 0.0) & ~done, best + row, np.inf)
            dist = np.minimum(dist, cand)
        out[src, :] = dist
    return out


jacobi_sweep_numpy = jacobi_sweep
dijkstra_all_pairs_numpy = dijkstra_all_pairs

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    jacobi_sweep_numba = None
    dijkstra_all_pairs_numba = None
else:
    jacobi_sweep_numba = njit(cache=True)(jacobi_sweep)
    dijkstra_all_pairs_numba = njit(cache=True)(dijkstra_all_pairs)

if BACKEND == "numba":
    jacobi_sweep = jacobi_sweep_numba
    dijkstra_all_pairs = dijkstra_all_pairs_numba
