"""Initial centroid selection: uniform sampling and k-means++."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import as_dataset
from .rng import Rng


@dataclass
class CentroidSet:
    """k x d centroids plus how far each moved in the last update."""

    values: np.ndarray
    shifts: np.ndarray = field(default=None)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] < 1:
            raise ValueError("centroids must be a non-empty (k, d) matrix")
        if self.shifts is None:
            self.shifts = np.zeros(self.values.shape[0])
        else:
            self.shifts = np.ascontiguousarray(self.shifts, dtype=np.float64)

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def copy(self) -> "CentroidSet":
        return CentroidSet(self.values.copy(), self.shifts.copy())


def _check_k(n: int, k: int) -> None:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")


def sample_indices(n: int, k: int, rng: Rng) -> np.ndarray:
    """k distinct indices from range(n), uniformly, by partial Fisher-Yates."""
    _check_k(n, k)
    perm = np.arange(n)
    for i in range(k):
        j = i + rng.below(n - i)
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:k].copy()


def seed_random(X, k: int, rng: Rng) -> CentroidSet:
    X = as_dataset(X)
    return CentroidSet(X[sample_indices(X.shape[0], k, rng)])


def kmeanspp_indices(X, k: int, rng: Rng, first: int | None = None) -> np.ndarray:
    """Point indices picked by D^2 sampling.

    One uniform draw per seed is inverted through the cumulative D^2 mass;
    the search returns the lowest index whose cumulative mass exceeds the
    target, so zero-mass points (already chosen ones included) are never hit.
    When all mass is zero the pick falls back to uniform over unchosen points.
    """
    X = as_dataset(X)
    n = X.shape[0]
    _check_k(n, k)
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.below(n) if first is None else int(first)
    if not 0 <= chosen[0] < n:
        raise ValueError("first seed index out of range")
    taken = np.zeros(n, dtype=bool)
    taken[chosen[0]] = True
    d2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    d2[chosen[0]] = 0.0
    for i in range(1, k):
        cum = np.cumsum(d2)
        total = cum[-1]
        if total > 0.0:
            target = rng.next_float() * total
            idx = int(np.searchsorted(cum, target, side="right"))
            if idx >= n:
                idx = int(np.flatnonzero(d2 > 0.0)[-1])
        else:
            free = np.flatnonzero(~taken)
            idx = int(free[rng.below(free.size)])
        chosen[i] = idx
        taken[idx] = True
        np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1), out=d2)
        d2[taken] = 0.0
    return chosen


def seed_kmeanspp(X, k: int, rng: Rng, first: int | None = None) -> CentroidSet:
    X = as_dataset(X)
    return CentroidSet(X[kmeanspp_indices(X, k, rng, first=first)])


SEEDERS = {"random": seed_random, "kmeanspp": seed_kmeanspp}


def make_seeds(X, k: int, seeding: str, rng_seed: int) -> CentroidSet:
    try:
        seeder = SEEDERS[seeding]
    except KeyError:
        raise ValueError(f"unknown seeding {seeding!r}") from None
    return seeder(X, k, Rng(rng_seed))
