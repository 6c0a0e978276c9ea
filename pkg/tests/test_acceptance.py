"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest summary.
"""

import json
import re
import time

import numpy as np
import pytest

from ccl_kmeans.bench import compute_pim, run, run_benchmark, warmup
from ccl_kmeans.ccl import ccl_recall
from ccl_kmeans.cli import main
from ccl_kmeans.core import RunConfig
from ccl_kmeans.dataset import gen_circle_gaussians, gen_grid_gaussians, write_matrix
from ccl_kmeans.rng import Rng
from ccl_kmeans.seeding import kmeanspp_indices, make_seeds

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

ALGOS = ("lloyd", "elkan", "lloyd-ccl", "elkan-ccl")


def record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module", autouse=True)
def compiled():
    warmup()


def test_1_elkan_equals_lloyd():
    start = time.perf_counter()
    shapes = [(2, 5), (2, 20), (10, 5), (10, 20), (2, 20)]
    worst_rel, mismatched = 0.0, 0
    for i, (d, k) in enumerate(shapes):
        X = np.random.default_rng(1000 + i).normal(size=(1000, d))
        seeding = ("random", "kmeanspp")[i % 2]
        for seed in range(5):
            lloyd = run(X, RunConfig("lloyd", k=k, seeding=seeding, rng_seed=seed))
            elkan = run(X, RunConfig("elkan", k=k, seeding=seeding, rng_seed=seed))
            mismatched += not np.array_equal(lloyd.assignment.owner, elkan.assignment.owner)
            worst_rel = max(worst_rel, abs(elkan.final_mse - lloyd.final_mse) / lloyd.final_mse)
    elapsed = time.perf_counter() - start
    ok = mismatched == 0 and worst_rel <= 1e-9 and elapsed < 10
    record(1, ok, f"25 runs, owner mismatches={mismatched}, max rel MSE diff={worst_rel:.2e} (<=1e-9), "
                  f"{elapsed:.2f}s (<10s)")


def test_2_full_candidate_list_is_identity():
    X = np.random.default_rng(2).normal(size=(1000, 3))
    hl_same, ht_rel = 0, 0.0
    for seed in range(5):
        a = run(X, RunConfig("lloyd", k=10, rng_seed=seed))
        b = run(X, RunConfig("lloyd-ccl", k=10, k_prime=10, rng_seed=seed))
        hl_same += (
            a.assignment.owner.tobytes() == b.assignment.owner.tobytes()
            and a.centroids.values.tobytes() == b.centroids.values.tobytes()
            and a.final_mse == b.final_mse
            and a.iterations == b.iterations
            and a.point_centroid_distances == b.point_centroid_distances
            and a.center_center_distances == b.center_center_distances
            and a.distance_history == b.distance_history
        )
        c = run(X, RunConfig("elkan", k=10, rng_seed=seed))
        e = run(X, RunConfig("elkan-ccl", k=10, k_prime=10, rng_seed=seed))
        ht_rel = max(ht_rel, abs(c.final_mse - e.final_mse) / c.final_mse)
    ok = hl_same == 5 and ht_rel <= 1e-9
    record(2, ok, f"HL(k'=k) bitwise equal to Lloyd in {hl_same}/5 seeds; HT(k'=k) max rel MSE diff={ht_rel:.2e}")


def test_3_counter_exactness():
    configs = [
        (np.random.default_rng(31).normal(size=(800, 2)), 12, 3),
        (gen_grid_gaussians(2000, 5, 10.0, 1.0, Rng(32)), 25, 10),
        (np.random.default_rng(33).uniform(size=(1500, 20)), 30, 12),
    ]
    failures = []
    for i, (X, k, kp) in enumerate(configs):
        n = X.shape[0]
        lloyd = run(X, RunConfig("lloyd", k=k, rng_seed=i))
        hl = run(X, RunConfig("lloyd-ccl", k=k, k_prime=kp, rng_seed=i))
        ht = run(X, RunConfig("elkan-ccl", k=k, k_prime=kp, rng_seed=i))
        if lloyd.point_centroid_distances != lloyd.iterations * n * k:
            failures.append(f"lloyd#{i}")
        if hl.point_centroid_distances != n * k + (hl.iterations - 1) * n * kp:
            failures.append(f"hl#{i}")
        if ht.post_first_distances > (ht.iterations - 1) * n * kp:
            failures.append(f"ht#{i}")
    record(3, not failures, f"3 configurations, failures={failures or 'none'}")


def test_4_mse_monotone():
    rng = np.random.default_rng(4)
    worst = 0.0
    runs = 0
    for cfg_id in range(20):
        n = int(rng.integers(50, 600))
        d = int(rng.integers(1, 8))
        k = int(rng.integers(2, 25))
        kp = int(rng.integers(1, k + 1))
        seeding = ("random", "kmeanspp")[cfg_id % 2]
        X = rng.normal(size=(n, d)) * rng.uniform(0.1, 10)
        for algo in ALGOS:
            r = run(X, RunConfig(algo, k=k, k_prime=kp if algo.endswith("ccl") else None,
                                 seeding=seeding, rng_seed=cfg_id, track_history=True))
            h = np.array(r.mse_history)
            if len(h) > 1:
                worst = max(worst, float(np.max((h[1:] - h[:-1]) / h[:-1])))
            runs += 1
    ok = worst <= 1e-9
    record(4, ok, f"{runs} runs, largest relative per-step MSE increase={worst:.2e} (<=1e-9)")


@pytest.fixture(scope="module")
def birch_runs():
    """Criterion 5 sweep: KMT vs HT on the regenerated Birch-like grid."""
    X = gen_grid_gaussians(20000, 10, 10.0, 1.0, Rng(2005))
    start = time.perf_counter()
    rows = []
    for seeding in ("random", "kmeanspp"):
        for seed in range(5):
            base_cfg = RunConfig("elkan", k=100, seeding=seeding, rng_seed=seed)
            seeds = make_seeds(X, 100, seeding, seed)
            base = run(X, base_cfg, seeds)
            for kp in (20, 40, 60):
                aug = run(X, RunConfig("elkan-ccl", k=100, k_prime=kp, seeding=seeding, rng_seed=seed), seeds)
                rows.append({
                    "seeding": seeding, "seed": seed, "k_prime": kp,
                    "pim": compute_pim(base.final_mse, aug.final_mse),
                    "recall": ccl_recall(X, aug),
                    "base_post": base.post_first_distances,
                    "aug_post": aug.post_first_distances,
                    "base_bounds": base.lower_bound_updates,
                    "aug_bounds": aug.lower_bound_updates,
                })
    return rows, time.perf_counter() - start


def test_5_pim_bound_birch(birch_runs):
    rows, elapsed = birch_runs
    worst = max(r["pim"] for r in rows)
    worst40 = max(r["pim"] for r in rows if r["k_prime"] == 40)
    ok = worst <= 1.5 and worst40 <= 0.5 and elapsed < 300
    record("5 (PIM)", ok, f"{len(rows)} HT runs, max PIM={worst:.4f} (<=1.5), max PIM at k'=40={worst40:.4f} "
                          f"(<=0.5), {elapsed:.1f}s (<300s)")


def test_5_distance_count_substitute(birch_runs):
    rows, _ = birch_runs
    at20 = [r for r in rows if r["k_prime"] == 20]
    ratios = [r["aug_post"] / r["base_post"] for r in at20]
    bound_ratios = [r["aug_bounds"] / r["base_bounds"] for r in at20]
    ok = max(ratios) <= 0.8
    record("5 (distances)", ok,
           f"HT/KMT post-first-iteration distance ratio at k'=20: max={max(ratios):.3f}, "
           f"min={min(ratios):.3f} (required <=0.8); lower-bound update ratio={max(bound_ratios):.3f}")


def test_6_circle_separation():
    start = time.perf_counter()
    worst = -np.inf
    count = 0
    for r in (0.0, 20.0, 40.0):
        X = gen_circle_gaussians(10000, 50, r, 0.25, Rng(600 + int(r)))
        for seeding in ("random", "kmeanspp"):
            for seed in range(5):
                rep = run_benchmark(
                    X,
                    RunConfig("elkan", k=50, seeding=seeding, rng_seed=seed),
                    RunConfig("elkan-ccl", k=50, k_prime=20, seeding=seeding, rng_seed=seed),
                )
                worst = max(worst, rep.pim)
                count += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 0.1 and elapsed < 120
    record(6, ok, f"{count} runs over r in {{0,20,40}}, max PIM={worst:.4f} (<=0.1), {elapsed:.1f}s (<120s)")


def test_7_recall(birch_runs):
    rows, _ = birch_runs
    recalls = [r["recall"] for r in rows if r["k_prime"] == 40]
    ok = min(recalls) >= 0.99
    record(7, ok, f"{len(recalls)} runs at k'=40, min recall={min(recalls):.4f} (>=0.99)")


def test_8_kmeanspp_law():
    X = np.array([[0.0], [1.0], [10.0]])
    trials = 10000
    rng = Rng(8)
    picks = np.array([kmeanspp_indices(X, 2, rng, first=0)[1] for _ in range(trials)])
    worst_z = 0.0
    for idx, weight in ((1, 1 / 101), (2, 100 / 101)):
        sigma = np.sqrt(trials * weight * (1 - weight))
        worst_z = max(worst_z, abs(np.sum(picks == idx) - trials * weight) / sigma)
    ok = worst_z <= 3 and set(picks.tolist()) <= {1, 2}
    record(8, ok, f"second-seed frequencies within {worst_z:.2f} sigma of D^2 weights (<=3)")


def test_9_cli_replay(tmp_path, capsys):
    data = tmp_path / "grid.txt"
    write_matrix(data, gen_grid_gaussians(3000, 6, 10.0, 1.0, Rng(9)))
    volatile = re.compile(r'"(wall_time_ms|created_utc)": [^,\n]+')
    outputs = []
    for algo, extra in (("lloyd", []), ("elkan", []), ("lloyd-ccl", ["--k-prime", "8"]),
                        ("elkan-ccl", ["--k-prime", "8"])):
        texts = []
        for _ in range(2):
            out = tmp_path / f"{algo}.json"
            assert main(["run", "--algo", algo, "--data", str(data), "--k", "36", "--seeding", "kmeanspp",
                         "--seed", "5", "--out", str(out), *extra]) == 0
            texts.append(volatile.sub("", out.read_text()).encode())
            json.loads(out.read_text())
        outputs.append(texts[0] == texts[1])
    ok = all(outputs)
    record(9, ok, f"{sum(outputs)}/4 algorithms replay byte-identical outside wall_time_ms/created_utc")
