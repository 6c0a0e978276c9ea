"""k-means with candidate cluster lists on top of Lloyd and Elkan."""

from .bench import BenchReport, compute_pim, compute_speedup, run, run_benchmark
from .ccl import CandidateLists, build_ccl, ccl_recall, run_elkan_ccl, run_lloyd_ccl
from .core import (
    Assignment,
    RunConfig,
    RunResult,
    assign_full,
    mse,
    run_lloyd,
    sq_dist,
    update_centroids,
)
from .dataset import (
    ParseError,
    gen_circle_gaussians,
    gen_grid_gaussians,
    gen_uniform,
    load_matrix,
    write_matrix,
)
from .elkan import ElkanBounds, center_separation, run_elkan
from .rng import Rng
from .seeding import CentroidSet, seed_kmeanspp, seed_random

__version__ = "0.1.0"
