"""Compiled inner loops shared by every runner.

All engines call the same ``_sqd`` so exact and bounded paths see bitwise
identical distances. Point loops use ``prange``; each kernel is built twice,
sequential (cached on disk) and parallel. Float accumulations that cross
points (centroid sums, MSE) only exist in sequential kernels.
"""

from __future__ import annotations

import math

import numba
import numpy as np
from numba import njit, prange

# skip the TBB probe, which warns on old system TBB builds
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@njit(cache=True, inline="always")
def _sqd(A, i, B, j):
    s = 0.0
    for t in range(A.shape[1]):
        diff = A[i, t] - B[j, t]
        s += diff * diff
    return s


@njit(cache=True)
def sq_dist_vec(a, b):
    s = 0.0
    for t in range(a.shape[0]):
        diff = a[t] - b[t]
        s += diff * diff
    return s


def _assign_full(X, C, owner, rows, store_rows):
    n = X.shape[0]
    k = C.shape[0]
    changed = 0
    for i in prange(n):
        best = np.inf
        bi = 0
        for c in range(k):
            dist = _sqd(X, i, C, c)
            if store_rows:
                rows[i, c] = dist
            if dist < best:
                best = dist
                bi = c
        if owner[i] != bi:
            owner[i] = bi
            changed += 1
    return changed


def _assign_ccl(X, C, lists, owner):
    n = X.shape[0]
    kp = lists.shape[1]
    changed = 0
    for i in prange(n):
        best = np.inf
        bi = -1
        for j in range(kp):
            c = lists[i, j]
            dist = _sqd(X, i, C, c)
            if dist < best or (dist == best and c < bi):
                best = dist
                bi = c
        if owner[i] != bi:
            owner[i] = bi
            changed += 1
    return changed


def _elkan_step(X, C, cc, s, owner, upper, lower, stale):
    n = X.shape[0]
    k = C.shape[0]
    ndist = 0
    changed = 0
    for i in prange(n):
        a = owner[i]
        a0 = a
        if upper[i] <= s[a]:
            continue
        local = 0
        for c in range(k):
            if c == a:
                continue
            # strict tests for lower-index candidates keep exact ties reachable
            if c < a:
                if upper[i] < lower[i, c] or upper[i] < 0.5 * cc[a, c]:
                    continue
            elif upper[i] <= lower[i, c] or upper[i] <= 0.5 * cc[a, c]:
                continue
            if stale[i]:
                da = math.sqrt(_sqd(X, i, C, a))
                local += 1
                upper[i] = da
                lower[i, a] = da
                stale[i] = False
                if c < a:
                    if upper[i] < lower[i, c] or upper[i] < 0.5 * cc[a, c]:
                        continue
                elif upper[i] <= lower[i, c] or upper[i] <= 0.5 * cc[a, c]:
                    continue
            dc = math.sqrt(_sqd(X, i, C, c))
            local += 1
            lower[i, c] = dc
            if dc < upper[i] or (dc == upper[i] and c < a):
                a = c
                upper[i] = dc
        ndist += local
        if a != a0:
            owner[i] = a
            changed += 1
    return ndist, changed


def _ht_step(X, C, cc, s, lists, owner, pos, upper, lower, stale):
    n = X.shape[0]
    kp = lists.shape[1]
    ndist = 0
    changed = 0
    for i in prange(n):
        a = owner[i]
        a0 = a
        if upper[i] <= s[a]:
            continue
        local = 0
        for j in range(kp):
            c = lists[i, j]
            if c == a:
                continue
            if c < a:
                if upper[i] < lower[i, j] or upper[i] < 0.5 * cc[a, c]:
                    continue
            elif upper[i] <= lower[i, j] or upper[i] <= 0.5 * cc[a, c]:
                continue
            if stale[i]:
                da = math.sqrt(_sqd(X, i, C, a))
                local += 1
                upper[i] = da
                lower[i, pos[i]] = da
                stale[i] = False
                if c < a:
                    if upper[i] < lower[i, j] or upper[i] < 0.5 * cc[a, c]:
                        continue
                elif upper[i] <= lower[i, j] or upper[i] <= 0.5 * cc[a, c]:
                    continue
            dc = math.sqrt(_sqd(X, i, C, c))
            local += 1
            lower[i, j] = dc
            if dc < upper[i] or (dc == upper[i] and c < a):
                a = c
                pos[i] = j
                upper[i] = dc
        ndist += local
        if a != a0:
            owner[i] = a
            changed += 1
    return ndist, changed


def _relax(lower, upper, stale, shifts, owner):
    n, k = lower.shape
    for i in prange(n):
        for c in range(k):
            v = lower[i, c] - shifts[c]
            lower[i, c] = v if v > 0.0 else 0.0
        upper[i] += shifts[owner[i]]
        stale[i] = True


def _relax_ccl(lower, upper, stale, shifts, owner, lists):
    n, kp = lower.shape
    for i in prange(n):
        for j in range(kp):
            v = lower[i, j] - shifts[lists[i, j]]
            lower[i, j] = v if v > 0.0 else 0.0
        upper[i] += shifts[owner[i]]
        stale[i] = True


@njit(cache=True)
def update_centroids(X, owner, old, new, shifts, counts):
    n, d = X.shape
    k = old.shape[0]
    sums = np.zeros((k, d))
    counts[:] = 0
    for i in range(n):
        c = owner[i]
        counts[c] += 1
        for t in range(d):
            sums[c, t] += X[i, t]
    for c in range(k):
        if counts[c] == 0:
            for t in range(d):
                new[c, t] = old[c, t]
            shifts[c] = 0.0
        else:
            for t in range(d):
                new[c, t] = sums[c, t] / counts[c]
            shifts[c] = math.sqrt(_sqd(old, c, new, c))


@njit(cache=True)
def total_sq_error(X, C, owner):
    total = 0.0
    for i in range(X.shape[0]):
        total += _sqd(X, i, C, owner[i])
    return total


@njit(cache=True)
def center_distances(C, cc):
    k = C.shape[0]
    for a in range(k):
        cc[a, a] = 0.0
        for b in range(a + 1, k):
            dist = math.sqrt(_sqd(C, a, C, b))
            cc[a, b] = dist
            cc[b, a] = dist


@njit(cache=True, inline="always")
def _before(d1, i1, d2, i2):
    return d1 < d2 or (d1 == d2 and i1 < i2)


@njit(cache=True, inline="always")
def _sift_down(hd, hi, size, root):
    # max-heap on (distance, index)
    while True:
        child = 2 * root + 1
        if child >= size:
            return
        if child + 1 < size and _before(hd[child], hi[child], hd[child + 1], hi[child + 1]):
            child += 1
        if _before(hd[root], hi[root], hd[child], hi[child]):
            hd[root], hd[child] = hd[child], hd[root]
            hi[root], hi[child] = hi[child], hi[root]
            root = child
        else:
            return


@njit(cache=True)
def topk_rows(rows, kp, out):
    """Per row, the kp smallest (distance, index) pairs in increasing order."""
    n, k = rows.shape
    hd = np.empty(kp)
    hi = np.empty(kp, dtype=np.int64)
    for r in range(n):
        for j in range(kp):
            hd[j] = rows[r, j]
            hi[j] = j
        for root in range(kp // 2 - 1, -1, -1):
            _sift_down(hd, hi, kp, root)
        for c in range(kp, k):
            if _before(rows[r, c], c, hd[0], hi[0]):
                hd[0] = rows[r, c]
                hi[0] = c
                _sift_down(hd, hi, kp, 0)
        # heapsort in place: repeatedly move the max to the end
        for end in range(kp - 1, 0, -1):
            hd[0], hd[end] = hd[end], hd[0]
            hi[0], hi[end] = hi[end], hi[0]
            _sift_down(hd, hi, end, 0)
        for j in range(kp):
            out[r, j] = hi[j]


_PARALLEL_SOURCES = {
    "assign_full": _assign_full,
    "assign_ccl": _assign_ccl,
    "elkan_step": _elkan_step,
    "ht_step": _ht_step,
    "relax": _relax,
    "relax_ccl": _relax_ccl,
}

_SEQUENTIAL = {name: njit(cache=True)(fn) for name, fn in _PARALLEL_SOURCES.items()}
_PARALLEL: dict = {}


def kernel(name: str, threads: int = 1):
    """Return the sequential or the parallel build of a point-loop kernel."""
    if threads <= 1:
        return _SEQUENTIAL[name]
    if name not in _PARALLEL:
        _PARALLEL[name] = njit(parallel=True)(_PARALLEL_SOURCES[name])
    return _PARALLEL[name]
