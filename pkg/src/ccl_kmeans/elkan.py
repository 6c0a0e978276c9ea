"""Elkan's exact k-means with triangle-inequality bounds.

Each point keeps an upper bound on the distance to its own centroid and a
lower bound per centroid. Bounds are true (square-rooted) distances since the
shift-based relaxation is only valid for a metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import Counters, RunConfig, RunResult, _Loop, initial_centroids
from .dataset import as_dataset
from .seeding import CentroidSet


@dataclass
class ElkanBounds:
    upper: np.ndarray  # (n,)
    lower: np.ndarray  # (n, k) or (n, k') for the candidate-list variant
    stale: np.ndarray  # (n,) bool: upper bound may be loose
    # centroid id of each lower-bound column; None when column c is centroid c
    columns: np.ndarray | None = None


def center_separation(cs: CentroidSet, counters: Counters | None = None):
    """Pairwise centroid distances and s(c) = half the distance to the nearest other centroid."""
    k = cs.k
    cc = np.empty((k, k))
    _kernels.center_distances(cs.values, cc)
    if counters is not None:
        counters.center_center += k * (k - 1) // 2
    return cc, _half_min_offdiag(cc)


def _half_min_offdiag(cc: np.ndarray) -> np.ndarray:
    k = cc.shape[0]
    if k == 1:
        return np.array([np.inf])
    masked = cc.copy()
    np.fill_diagonal(masked, np.inf)
    return 0.5 * masked.min(axis=1)


def init_bounds(rows: np.ndarray, owner: np.ndarray) -> ElkanBounds:
    """Bounds from a full pass of squared distances: l = d(x, c), u = d(x, owner)."""
    lower = np.sqrt(rows)
    upper = lower[np.arange(lower.shape[0]), owner].copy()
    return ElkanBounds(upper, lower, np.zeros(lower.shape[0], dtype=bool))


def relax_bounds(bounds: ElkanBounds, shifts, owner, columns=None, threads: int = 1) -> int:
    """Loosen the bounds after the centroids moved by ``shifts``.

    ``columns`` maps lower-bound columns to centroid ids (the candidate
    lists); ``None`` means column c is centroid c. Returns the number of
    lower bounds touched.
    """
    if columns is None:
        _kernels.kernel("relax", threads)(bounds.lower, bounds.upper, bounds.stale, shifts, owner)
    else:
        _kernels.kernel("relax_ccl", threads)(
            bounds.lower, bounds.upper, bounds.stale, shifts, owner, columns
        )
    return bounds.lower.size


def run_elkan(X, cfg: RunConfig, init: CentroidSet | None = None, callback=None) -> RunResult:
    X = as_dataset(X)
    if cfg.algorithm != "elkan":
        raise ValueError(f"run_elkan cannot run algorithm {cfg.algorithm!r}")
    seeds = initial_centroids(X, cfg, init)
    n, k = X.shape[0], cfg.k
    step = _kernels.kernel("elkan_step", cfg.threads)
    loop = _Loop(X, cfg, seeds, callback)

    rows = np.empty((n, k))
    _kernels.kernel("assign_full", cfg.threads)(X, loop.C, loop.owner, rows, True)
    bounds = init_bounds(rows, loop.owner)
    loop.record_pass(n * k, bounds)
    del rows
    cc = np.empty((k, k))
    while True:
        loop.update()
        if loop.iterations >= cfg.max_iters:
            break
        loop.bound_updates += relax_bounds(bounds, loop.shifts, loop.owner, threads=cfg.threads)
        _kernels.center_distances(loop.C, cc)
        loop.center_center += k * (k - 1) // 2
        s = _half_min_offdiag(cc)
        ndist, changed = step(X, loop.C, cc, s, loop.owner, bounds.upper, bounds.lower, bounds.stale)
        loop.record_pass(ndist, bounds)
        if changed == 0:
            loop.converged = True
            break
    return loop.result()
