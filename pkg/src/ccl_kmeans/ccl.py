"""Candidate cluster lists.

After the first full assignment pass every point keeps the indices of its k'
nearest centroids. Later passes only look at those k' centroids, which turns
the per-iteration cost from n*k into at most n*k' distances. The lists are
fixed for the whole run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import RunConfig, RunResult, _Loop, initial_centroids
from .dataset import as_dataset
from .elkan import _half_min_offdiag, relax_bounds, init_bounds
from .seeding import CentroidSet


@dataclass
class CandidateLists:
    lists: np.ndarray  # (n, k') int32, each row nearest-first at build time

    @property
    def k_prime(self) -> int:
        return self.lists.shape[1]

    @property
    def nbytes(self) -> int:
        return self.lists.nbytes

    def contains(self, owner: np.ndarray) -> np.ndarray:
        """Per point, whether ``owner[x]`` is in the list of x."""
        return np.any(self.lists == np.asarray(owner)[:, None], axis=1)


def build_ccl(distance_rows, k_prime: int) -> CandidateLists:
    """k' nearest centroid ids per row, nearest first, ties to the lower id.

    Uses a bounded max-heap per row, O(k log k') per point.
    """
    rows = np.ascontiguousarray(distance_rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError("distance rows must be an (n, k) matrix")
    k = rows.shape[1]
    if not 1 <= k_prime <= k:
        raise ValueError(f"k_prime must be in [1, {k}], got {k_prime}")
    out = np.empty((rows.shape[0], k_prime), dtype=np.int32)
    _kernels.topk_rows(rows, k_prime, out)
    return CandidateLists(out)


def _first_pass(loop: _Loop, X: np.ndarray, cfg: RunConfig) -> np.ndarray:
    rows = np.empty((X.shape[0], cfg.k))
    _kernels.kernel("assign_full", cfg.threads)(X, loop.C, loop.owner, rows, True)
    return rows


def run_lloyd_ccl(X, cfg: RunConfig, init: CentroidSet | None = None, callback=None) -> RunResult:
    """Lloyd's algorithm with assignment restricted to each point's candidate list."""
    X = as_dataset(X)
    if cfg.algorithm != "lloyd-ccl":
        raise ValueError(f"run_lloyd_ccl cannot run algorithm {cfg.algorithm!r}")
    seeds = initial_centroids(X, cfg, init)
    n = X.shape[0]
    assign = _kernels.kernel("assign_ccl", cfg.threads)
    loop = _Loop(X, cfg, seeds, callback)

    rows = _first_pass(loop, X, cfg)
    ccl = build_ccl(rows, cfg.k_prime)
    del rows
    loop.record_pass(n * cfg.k)
    while True:
        loop.update()
        if loop.iterations >= cfg.max_iters:
            break
        changed = assign(X, loop.C, ccl.lists, loop.owner)
        loop.record_pass(n * cfg.k_prime)
        if changed == 0:
            loop.converged = True
            break
    return loop.result(candidates=ccl)


def run_elkan_ccl(X, cfg: RunConfig, init: CentroidSet | None = None, callback=None) -> RunResult:
    """Elkan's method with lower bounds kept only for candidate-list members.

    Centroid separations are still computed over all k centroids.
    """
    X = as_dataset(X)
    if cfg.algorithm != "elkan-ccl":
        raise ValueError(f"run_elkan_ccl cannot run algorithm {cfg.algorithm!r}")
    seeds = initial_centroids(X, cfg, init)
    n, k = X.shape[0], cfg.k
    step = _kernels.kernel("ht_step", cfg.threads)
    loop = _Loop(X, cfg, seeds, callback)

    rows = _first_pass(loop, X, cfg)
    ccl = build_ccl(rows, cfg.k_prime)
    # the nearest centroid heads every list
    pos = np.zeros(n, dtype=np.int64)
    bounds = init_bounds(np.take_along_axis(rows, ccl.lists.astype(np.int64), axis=1), pos)
    bounds.columns = ccl.lists
    del rows
    loop.record_pass(n * k, bounds)
    cc = np.empty((k, k))
    while True:
        loop.update()
        if loop.iterations >= cfg.max_iters:
            break
        loop.bound_updates += relax_bounds(
            bounds, loop.shifts, loop.owner, columns=ccl.lists, threads=cfg.threads
        )
        _kernels.center_distances(loop.C, cc)
        loop.center_center += k * (k - 1) // 2
        s = _half_min_offdiag(cc)
        ndist, changed = step(
            X, loop.C, cc, s, ccl.lists, loop.owner, pos, bounds.upper, bounds.lower, bounds.stale
        )
        loop.record_pass(ndist, bounds)
        if changed == 0:
            loop.converged = True
            break
    return loop.result(candidates=ccl)


def ccl_recall(X, result: RunResult, lists: CandidateLists | None = None) -> float:
    """Fraction of points whose nearest final centroid is in their candidate list.

    Runs an uncounted full pass against ``result.centroids``.
    """
    X = as_dataset(X)
    lists = lists if lists is not None else result.candidates
    if lists is None:
        raise ValueError("no candidate lists to score")
    owner = np.full(X.shape[0], -1, dtype=np.int64)
    _kernels.kernel("assign_full")(X, result.centroids.values, owner, np.empty((0, 0)), False)
    return float(np.mean(lists.contains(owner)))
