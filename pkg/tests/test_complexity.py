import numpy as np
import pytest

from dradapt.complexity import (clamped_ks, complexity_features,
                                knn_similarity_matrix, mnc, pds,
                                snn_similarity_matrix)
from dradapt.data import Dataset, SyntheticSpec, generate_synthetic
from dradapt.distance import neighbor_ranking, pairwise_distances
from dradapt.errors import DegenerateInputError, ValidationError

from oracles import mnc_oracle, pds_oracle


def collinear(n):
    return np.arange(n, dtype=np.float64)[:, None]


def unit_simplex(d):
    """d+1 points with all pairwise distances computed identically."""
    return np.eye(d + 1) / np.sqrt(2.0)


class TestPds:

    def test_collinear_hand_value(self):
        # pair distances {1,1,2}: mean 4/3, population sigma sqrt(2/9),
        # ln of the ratio frozen from the hand enumeration
        value = pds(pairwise_distances(collinear(3)))
        assert value == pytest.approx(-1.0397207708399179, abs=1e-12)

    def test_matches_oracle(self, rng):
        pts = rng.standard_normal((25, 4))
        assert pds(pairwise_distances(pts)) == pytest.approx(
            pds_oracle(pts.tolist()), abs=1e-10)

    def test_equilateral_simplex_degenerate(self):
        with pytest.raises(DegenerateInputError, match="zero distance variance"):
            pds(pairwise_distances(unit_simplex(2)))

    def test_scale_invariant(self, rng):
        pts = rng.standard_normal((30, 8))
        base = pds(pairwise_distances(pts))
        for alpha in (1e-6, 1.0, 1e6):
            assert abs(pds(pairwise_distances(alpha * pts)) - base) <= 1e-12


class TestKnnSimilarity:

    def test_direct_formula(self):
        nr = neighbor_ranking(pairwise_distances(collinear(4)), 2)
        w = knn_similarity_matrix(nr)
        assert w[0, 1] == 2.0 and w[0, 2] == 1.0  # r=1 -> 2, r=2 -> 1
        assert w[0, 3] == 0.0

    def test_row_sums(self, rng):
        k = 5
        nr = neighbor_ranking(pairwise_distances(rng.standard_normal((20, 3))), k)
        w = knn_similarity_matrix(nr)
        assert ((w > 0).sum(axis=1) == k).all()
        assert np.all(w.sum(axis=1) == k * (k + 1) / 2)

    def test_zero_diagonal(self, rng):
        nr = neighbor_ranking(pairwise_distances(rng.standard_normal((10, 2))), 3)
        assert (np.diag(knn_similarity_matrix(nr)) == 0).all()


class TestSnnSimilarity:

    def test_collinear_shared_neighbor(self):
        # NN lists 0:[1,2], 1:[0,2], 2:[1,3], 3:[2,4], 4:[3,2]; pair (0,1)
        # shares only point 2 at ranks (2,2) -> one term (1)(1)=1
        nr = neighbor_ranking(pairwise_distances(collinear(5)), 2)
        assert nr.nn.tolist() == [[1, 2], [0, 2], [1, 3], [2, 4], [3, 2]]
        s = snn_similarity_matrix(nr)
        assert s[0, 1] == 1.0

    def test_identical_lists_maximal(self):
        # points 0 and 1 both have NN list [2, 3] in the same order
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.1], [0.5, 0.3],
                        [50.0, 50.0]])
        nr = neighbor_ranking(pairwise_distances(pts), 2)
        assert nr.nn[0].tolist() == [2, 3]
        assert nr.nn[1].tolist() == [2, 3]
        s = snn_similarity_matrix(nr)
        assert s[0, 1] == 2 * 2 + 1 * 1

    def test_disjoint_lists_zero(self):
        # two tight faraway pairs plus a bridge: pairs only neighbor locally
        pts = np.array([[0.0], [0.1], [100.0], [100.1], [50.0], [50.1]])
        nr = neighbor_ranking(pairwise_distances(pts), 1)
        s = snn_similarity_matrix(nr)
        assert s[0, 2] == 0.0

    def test_symmetric(self, rng):
        nr = neighbor_ranking(pairwise_distances(rng.standard_normal((25, 4))), 6)
        s = snn_similarity_matrix(nr)
        assert np.array_equal(s, s.T)
        assert (np.diag(s) == 0).all()


class TestMnc:

    def test_matches_bruteforce_collinear(self):
        ds = Dataset(points=collinear(10))
        assert mnc(ds, 2) == pytest.approx(mnc_oracle(ds.points.tolist(), 2),
                                           abs=1e-12)

    def test_matches_bruteforce_random(self, rng):
        for trial in range(25):
            n = int(rng.integers(5, 13))
            k = int(rng.integers(1, 5))
            pts = rng.standard_normal((n, int(rng.integers(1, 4))))
            got = mnc(Dataset(points=pts, name=f"t{trial}"), k)
            assert got == pytest.approx(mnc_oracle(pts.tolist(), k), abs=1e-12)

    def test_scale_invariance_exact(self, rng):
        pts = rng.standard_normal((40, 10))
        base = mnc(Dataset(points=pts), 8)
        for alpha in (1e-6, 1e-3, 1e3, 1e6):
            assert mnc(Dataset(points=alpha * pts), 8) == base

    def test_range(self, rng):
        for _ in range(50):
            n = int(rng.integers(5, 30))
            pts = rng.standard_normal((n, int(rng.integers(1, 6))))
            v = mnc(Dataset(points=pts), int(rng.integers(1, n)))
            assert 0.0 <= v <= 1.0

    def test_k_too_large(self, rng):
        with pytest.raises(ValidationError):
            mnc(Dataset(points=rng.standard_normal((10, 2))), 10)

    def test_accepts_precomputed_ranking(self, rng):
        pts = rng.standard_normal((30, 4))
        ds = Dataset(points=pts)
        nr = neighbor_ranking(pairwise_distances(ds), 10)
        assert mnc(nr, 5) == mnc(ds, 5)


class TestComplexityFeatures:

    def test_default_arity_and_ranges(self, rng):
        ds = Dataset(points=rng.standard_normal((500, 4)), name="blob")
        fv = complexity_features(ds)
        assert len(fv) == 4
        assert fv.labels == ["pds", "mnc-25", "mnc-50", "mnc-75"]
        assert all(0.0 <= v <= 1.0 for v in fv.values[1:])
        assert np.isfinite(fv.values).all()

    def test_single_k(self, rng):
        ds = Dataset(points=rng.standard_normal((80, 3)))
        fv = complexity_features(ds, ks=[50])
        assert len(fv) == 2

    def test_k_exceeding_n_rejected(self, rng):
        ds = Dataset(points=rng.standard_normal((30, 3)))
        with pytest.raises(ValidationError):
            complexity_features(ds, ks=[25, 50, 75])

    def test_low_dim_scores_higher(self):
        # same cardinality, wildly different ambient dimension: every
        # feature should come out strictly larger for the 2-D cloud
        lo = generate_synthetic(SyntheticSpec(kind="iid-gaussian", n=200, d=2, seed=9))
        hi = generate_synthetic(SyntheticSpec(kind="iid-gaussian", n=200, d=512, seed=9))
        fv_lo = complexity_features(lo, ks=[25, 50, 75])
        fv_hi = complexity_features(hi, ks=[25, 50, 75])
        assert (fv_lo.values > fv_hi.values).all()

    def test_uniform_highdim_pds_lower(self):
        lo = generate_synthetic(SyntheticSpec(kind="iid-uniform", n=200, d=2, seed=9))
        hi = generate_synthetic(SyntheticSpec(kind="iid-uniform", n=200, d=512, seed=9))
        assert pds(pairwise_distances(hi)) < pds(pairwise_distances(lo))

    def test_degenerate_propagates(self):
        ds = Dataset(points=unit_simplex(3))
        with pytest.raises(DegenerateInputError):
            complexity_features(ds, ks=[2])

    def test_clamped_ks(self):
        assert clamped_ks([25, 50, 75], 40) == [25, 39]
        assert clamped_ks([25, 50, 75], 200) == [25, 50, 75]
