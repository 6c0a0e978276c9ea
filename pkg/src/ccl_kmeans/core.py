"""Distance kernel, assignment, centroid update, objective and Lloyd's runner.

These exact routines double as the reference the accelerated runners are
checked against.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dataset import as_dataset
from .seeding import CentroidSet, make_seeds

ALGORITHMS = ("lloyd", "elkan", "lloyd-ccl", "elkan-ccl")
SEEDINGS = ("random", "kmeanspp")


@dataclass
class Counters:
    point_centroid: int = 0
    center_center: int = 0


@dataclass
class Assignment:
    owner: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_owner(cls, owner, k: int) -> "Assignment":
        owner = np.ascontiguousarray(owner, dtype=np.int64)
        if owner.size and (owner.min() < 0 or owner.max() >= k):
            raise ValueError("owner index out of range")
        return cls(owner, np.bincount(owner, minlength=k).astype(np.int64))


@dataclass
class RunConfig:
    algorithm: str = "lloyd"
    k: int = 2
    k_prime: int | None = None
    seeding: str = "random"
    rng_seed: int = 0
    max_iters: int = 1000
    threads: int = 1
    # record the objective after every update (evaluation only, not counted)
    track_history: bool = False

    @property
    def uses_ccl(self) -> bool:
        return self.algorithm.endswith("-ccl")

    def validate(self, n: int | None = None) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.seeding not in SEEDINGS:
            raise ValueError(f"unknown seeding {self.seeding!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if n is not None and self.k > n:
            raise ValueError(f"k={self.k} exceeds the number of points n={n}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.uses_ccl:
            if self.k_prime is None or not 1 <= self.k_prime <= self.k:
                raise ValueError(f"k_prime must be in [1, k] for {self.algorithm}")

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "k": self.k,
            "k_prime": self.k_prime,
            "seeding": self.seeding,
            "rng_seed": self.rng_seed,
            "max_iters": self.max_iters,
            "threads": self.threads,
        }


@dataclass
class RunResult:
    algorithm: str
    final_mse: float
    iterations: int
    wall_time_ms: float
    point_centroid_distances: int
    center_center_distances: int
    # lower-bound entries relaxed after centroid moves (bounded runners only)
    lower_bound_updates: int
    assignment: Assignment
    centroids: CentroidSet
    initial_centroids: CentroidSet
    # exact point-centroid distances spent in each assignment pass
    distance_history: list = field(default_factory=list)
    mse_history: list = field(default_factory=list)
    converged: bool = True
    candidates: object = None

    @property
    def post_first_distances(self) -> int:
        return int(sum(self.distance_history[1:]))

    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "iterations": self.iterations,
            "converged": self.converged,
            "wall_time_ms": self.wall_time_ms,
            "point_centroid_distances": self.point_centroid_distances,
            "post_first_iteration_distances": self.post_first_distances,
            "center_center_distances": self.center_center_distances,
            "lower_bound_updates": self.lower_bound_updates,
            "final_mse": self.final_mse,
        }


def _check_dims(X: np.ndarray, C: np.ndarray) -> None:
    if X.shape[1] != C.shape[1]:
        raise ValueError(f"dimension mismatch: points d={X.shape[1]}, centroids d={C.shape[1]}")


def sq_dist(a, b) -> float:
    """Squared Euclidean distance between two vectors."""
    a = np.ascontiguousarray(a, dtype=np.float64).ravel()
    b = np.ascontiguousarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    return float(_kernels.sq_dist_vec(a, b))


def assign_full(X, cs: CentroidSet, return_rows: bool = False, counters: Counters | None = None):
    """Nearest-centroid assignment over all k centroids (n*k distances).

    Ties go to the lowest centroid index. With ``return_rows`` the n x k
    squared distances are returned as well, otherwise ``None``.
    """
    X = as_dataset(X)
    _check_dims(X, cs.values)
    n, k = X.shape[0], cs.k
    owner = np.full(n, -1, dtype=np.int64)
    rows = np.empty((n, k)) if return_rows else np.empty((0, 0))
    _kernels.kernel("assign_full")(X, cs.values, owner, rows, return_rows)
    if counters is not None:
        counters.point_centroid += n * k
    return Assignment.from_owner(owner, k), (rows if return_rows else None)


def update_centroids(X, a: Assignment, prev: CentroidSet) -> CentroidSet:
    """Means of the members; empty clusters keep their previous centroid."""
    X = as_dataset(X)
    _check_dims(X, prev.values)
    new = np.empty_like(prev.values)
    shifts = np.empty(prev.k)
    counts = np.empty(prev.k, dtype=np.int64)
    _kernels.update_centroids(X, a.owner, prev.values, new, shifts, counts)
    return CentroidSet(new, shifts)


def mse(X, cs: CentroidSet, a: Assignment) -> float:
    """Sum of squared distances of each point to its own centroid."""
    X = as_dataset(X)
    _check_dims(X, cs.values)
    return float(_kernels.total_sq_error(X, cs.values, a.owner))


def initial_centroids(X: np.ndarray, cfg: RunConfig, init: CentroidSet | None) -> CentroidSet:
    cfg.validate(X.shape[0])
    if init is None:
        return make_seeds(X, cfg.k, cfg.seeding, cfg.rng_seed)
    if init.k != cfg.k:
        raise ValueError(f"initial centroids have k={init.k}, config has k={cfg.k}")
    _check_dims(X, init.values)
    return CentroidSet(init.values.copy())


@dataclass
class PassState:
    """What an observer sees after each assignment pass (live arrays, copy to keep)."""

    iteration: int
    centroids: np.ndarray
    owner: np.ndarray
    bounds: object = None


class _Loop:
    """Bookkeeping shared by the runners: centroid double buffer and counters."""

    def __init__(self, X, cfg, seeds, callback=None):
        self.callback = callback
        self.X = X
        self.cfg = cfg
        self.seeds = seeds
        self.C = seeds.values.copy()
        self.C_next = np.empty_like(self.C)
        self.shifts = np.zeros(cfg.k)
        self.counts = np.zeros(cfg.k, dtype=np.int64)
        self.owner = np.full(X.shape[0], -1, dtype=np.int64)
        self.iterations = 0
        self.point_centroid = 0
        self.center_center = 0
        self.bound_updates = 0
        self.distance_history = []
        self.mse_history = []
        self.converged = False
        self._t0 = time.perf_counter()

    def record_pass(self, ndist: int, bounds=None) -> None:
        self.iterations += 1
        self.point_centroid += int(ndist)
        self.distance_history.append(int(ndist))
        if self.callback is not None:
            self.callback(PassState(self.iterations, self.C, self.owner, bounds))

    def update(self) -> None:
        _kernels.update_centroids(self.X, self.owner, self.C, self.C_next, self.shifts, self.counts)
        self.C, self.C_next = self.C_next, self.C
        if self.cfg.track_history:
            self.mse_history.append(float(_kernels.total_sq_error(self.X, self.C, self.owner)))

    def result(self, candidates=None) -> RunResult:
        wall_ms = (time.perf_counter() - self._t0) * 1e3
        k = self.cfg.k
        return RunResult(
            algorithm=self.cfg.algorithm,
            final_mse=float(_kernels.total_sq_error(self.X, self.C, self.owner)),
            iterations=self.iterations,
            wall_time_ms=wall_ms,
            point_centroid_distances=self.point_centroid,
            center_center_distances=self.center_center,
            lower_bound_updates=self.bound_updates,
            assignment=Assignment.from_owner(self.owner.copy(), k),
            centroids=CentroidSet(self.C.copy(), self.shifts.copy()),
            initial_centroids=self.seeds,
            distance_history=self.distance_history,
            mse_history=self.mse_history,
            converged=self.converged,
            candidates=candidates,
        )


def run_lloyd(X, cfg: RunConfig, init: CentroidSet | None = None, callback=None) -> RunResult:
    """Plain Lloyd iterations until no point changes owner or max_iters."""
    X = as_dataset(X)
    if cfg.algorithm != "lloyd":
        raise ValueError(f"run_lloyd cannot run algorithm {cfg.algorithm!r}")
    seeds = initial_centroids(X, cfg, init)
    n, k = X.shape[0], cfg.k
    assign = _kernels.kernel("assign_full", cfg.threads)
    no_rows = np.empty((0, 0))
    loop = _Loop(X, cfg, seeds, callback)
    while loop.iterations < cfg.max_iters:
        changed = assign(X, loop.C, loop.owner, no_rows, False)
        loop.record_pass(n * k)
        if changed == 0:
            loop.converged = True
            break
        loop.update()
    return loop.result()
