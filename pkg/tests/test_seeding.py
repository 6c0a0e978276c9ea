import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccl_kmeans.rng import Rng
from ccl_kmeans.seeding import (
    kmeanspp_indices,
    make_seeds,
    sample_indices,
    seed_kmeanspp,
    seed_random,
)


def rows_in(C, X):
    return all(any(np.array_equal(c, x) for x in X) for c in C)


class TestRandom:
    def test_k_equals_n_is_permutation(self):
        X = np.arange(12.0).reshape(6, 2)
        cs = seed_random(X, 6, Rng(1))
        assert sorted(map(tuple, cs.values)) == sorted(map(tuple, X))

    def test_single_seed_is_a_point(self):
        X = np.random.default_rng(0).normal(size=(30, 3))
        cs = seed_random(X, 1, Rng(2))
        assert cs.k == 1 and rows_in(cs.values, X)
        assert np.all(cs.shifts == 0)

    def test_uniform_frequencies(self):
        counts = np.zeros(5)
        rng = Rng(2024)
        for _ in range(10000):
            counts[sample_indices(5, 1, rng)[0]] += 1
        assert np.all(np.abs(counts / 10000 - 0.2) <= 0.02)

    def test_without_replacement(self):
        idx = sample_indices(50, 50, Rng(3))
        assert sorted(idx) == list(range(50))

    @pytest.mark.parametrize("k", [0, 4])
    def test_bad_k(self, k):
        with pytest.raises(ValueError):
            seed_random(np.zeros((3, 1)), k, Rng(0))


class TestKMeansPP:
    def test_one_point(self):
        cs = seed_kmeanspp(np.array([[3.0, 4.0]]), 1, Rng(0))
        np.testing.assert_array_equal(cs.values, [[3.0, 4.0]])

    def test_forced_second_pick(self):
        X = np.array([[0.0], [1000.0]])
        for seed in range(20):
            assert sorted(kmeanspp_indices(X, 2, Rng(seed))) == [0, 1]

    def test_d2_law(self):
        # weights after fixing the first seed at 0: D^2 = 1 and 100
        X = np.array([[0.0], [1.0], [10.0]])
        trials = 10000
        rng = Rng(77)
        picks = np.array([kmeanspp_indices(X, 2, rng, first=0)[1] for _ in range(trials)])
        assert set(np.unique(picks)) <= {1, 2}
        p = 1 / 101
        sigma = np.sqrt(trials * p * (1 - p))
        assert abs(np.sum(picks == 1) - trials * p) <= 3 * sigma

    def test_zero_mass_falls_back_to_unchosen(self):
        X = np.full((4, 2), 5.0)
        idx = kmeanspp_indices(X, 4, Rng(1))
        assert sorted(idx) == [0, 1, 2, 3]

    def test_first_out_of_range(self):
        with pytest.raises(ValueError):
            kmeanspp_indices(np.zeros((3, 1)), 2, Rng(0), first=3)

    def test_too_many_seeds(self):
        with pytest.raises(ValueError):
            seed_kmeanspp(np.zeros((3, 1)), 4, Rng(0))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 40), st.integers(0, 2**64 - 1), st.data())
    def test_distinct_while_mass_remains(self, n, seed, data):
        k = data.draw(st.integers(1, n))
        X = np.random.default_rng(seed % 1000).integers(0, 4, size=(n, 2)).astype(float)
        idx = kmeanspp_indices(X, k, Rng(seed))
        assert len(set(idx.tolist())) == k
        distinct = len({tuple(x) for x in X})
        # as long as unchosen distinct locations exist, picks land on new locations
        locations = {tuple(X[i]) for i in idx}
        assert len(locations) == min(k, distinct)


@pytest.mark.parametrize("seeding", ["random", "kmeanspp"])
def test_seeds_are_dataset_points_and_deterministic(seeding):
    X = np.random.default_rng(1).normal(size=(200, 4))
    a = make_seeds(X, 10, seeding, 123)
    b = make_seeds(X, 10, seeding, 123)
    assert a.values.tobytes() == b.values.tobytes()
    assert rows_in(a.values, X)


def test_unknown_seeding():
    with pytest.raises(ValueError):
        make_seeds(np.zeros((3, 1)), 1, "farthest", 0)
