"""Matched-seed comparison of a base algorithm against its candidate-list variant."""

from __future__ import annotations

import platform
from dataclasses import dataclass

import numpy as np
import numba

from .ccl import ccl_recall, run_elkan_ccl, run_lloyd_ccl
from .core import RunConfig, RunResult, run_lloyd
from .dataset import as_dataset
from .elkan import run_elkan
from .seeding import CentroidSet, make_seeds

RUNNERS = {
    "lloyd": run_lloyd,
    "elkan": run_elkan,
    "lloyd-ccl": run_lloyd_ccl,
    "elkan-ccl": run_elkan_ccl,
}


def run(X, cfg: RunConfig, init: CentroidSet | None = None, callback=None) -> RunResult:
    """Dispatch on ``cfg.algorithm``."""
    try:
        runner = RUNNERS[cfg.algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {cfg.algorithm!r}") from None
    return runner(X, cfg, init, callback)


_warm: set = set()


def warmup(threads: int = 1) -> None:
    """Force JIT compilation so it never lands inside a timed run."""
    if threads in _warm:
        return
    X = np.array([[0.0, 0.0], [0.1, 0.0], [5.0, 5.0], [5.1, 5.0], [9.0, 0.0]])
    for algo in RUNNERS:
        run(X, RunConfig(algorithm=algo, k=3, k_prime=2, threads=threads))
    _warm.add(threads)


def compute_speedup(t_base: float, t_aug: float) -> float:
    """T / T'."""
    if t_base <= 0 or t_aug <= 0:
        raise ValueError("durations must be positive")
    return t_base / t_aug


def compute_pim(e_base: float, e_aug: float) -> float:
    """Percentage increase in MSE, 100 * (E' - E) / E. Negative values are legal."""
    if e_base == 0 and e_aug == 0:
        return 0.0
    if e_base <= 0:
        raise ValueError("base MSE must be positive to compute PIM")
    return 100.0 * (e_aug - e_base) / e_base


def environment_note(threads: int) -> str:
    return (
        f"python {platform.python_version()}; numpy {np.__version__}; "
        f"numba {numba.__version__}; {platform.machine()}; threads={threads}"
    )


@dataclass
class BenchReport:
    base: RunResult
    augmented: RunResult
    base_config: RunConfig
    augmented_config: RunConfig
    speedup: float
    pim: float
    ccl_recall: float
    environment: str

    @property
    def distance_ratio(self) -> float:
        """Base over augmented exact distances per pass, after the first pass.

        Hardware-independent counterpart of the wall-clock speedup.
        """
        base_iters = self.base.iterations - 1
        aug_iters = self.augmented.iterations - 1
        if base_iters < 1 or aug_iters < 1 or self.augmented.post_first_distances == 0:
            return float("nan")
        base_rate = self.base.post_first_distances / base_iters
        return base_rate / (self.augmented.post_first_distances / aug_iters)

    def as_dict(self) -> dict:
        ratio = self.distance_ratio
        return {
            "base": {**self.base_config.as_dict(), **self.base.summary()},
            "augmented": {**self.augmented_config.as_dict(), **self.augmented.summary()},
            "speedup": self.speedup,
            "pim": self.pim,
            "ccl_recall": self.ccl_recall,
            "distance_ratio": None if np.isnan(ratio) else ratio,
            "environment": self.environment,
        }


def check_pair(base_cfg: RunConfig, aug_cfg: RunConfig) -> None:
    if base_cfg.algorithm not in ("lloyd", "elkan"):
        raise ValueError(f"base algorithm must be lloyd or elkan, got {base_cfg.algorithm!r}")
    if aug_cfg.algorithm != base_cfg.algorithm + "-ccl":
        raise ValueError(f"augmented algorithm for {base_cfg.algorithm} must be {base_cfg.algorithm}-ccl")
    for name in ("k", "seeding", "rng_seed", "max_iters", "threads"):
        if getattr(base_cfg, name) != getattr(aug_cfg, name):
            raise ValueError(f"base and augmented configs differ in {name}")


def run_benchmark(X, base_cfg: RunConfig, aug_cfg: RunConfig) -> BenchReport:
    """Run base then augmented from the same seeds and compare them."""
    X = as_dataset(X)
    check_pair(base_cfg, aug_cfg)
    base_cfg.validate(X.shape[0])
    aug_cfg.validate(X.shape[0])
    warmup(base_cfg.threads)
    if base_cfg.threads > 1:
        numba.set_num_threads(min(base_cfg.threads, numba.config.NUMBA_NUM_THREADS))
    seeds = make_seeds(X, base_cfg.k, base_cfg.seeding, base_cfg.rng_seed)
    base = run(X, base_cfg, seeds)
    aug = run(X, aug_cfg, seeds)
    return BenchReport(
        base=base,
        augmented=aug,
        base_config=base_cfg,
        augmented_config=aug_cfg,
        speedup=compute_speedup(base.wall_time_ms, aug.wall_time_ms),
        pim=compute_pim(base.final_mse, aug.final_mse),
        ccl_recall=ccl_recall(X, aug),
        environment=environment_note(base_cfg.threads),
    )
