"""Redundancy scoring: streaming accumulators, MICI values, weight assignment."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsscn.feature_weighting import (ConstantFeatureError, FeatureWeighter,
                                     PairStats, feature_scores, input_weights,
                                     mici, mici_series, pearson)


def stats_of(x1, x2):
    return PairStats().update(x1, x2)


class TestPairStats:
    def test_population_moments(self):
        x1 = np.array([0.0, 1.0, 2.0, 3.0])
        x2 = np.array([0.0, 1.0, 0.0, 1.0])
        s = stats_of(x1, x2)
        assert s.count == 4
        assert s.var1 == pytest.approx(np.var(x1))
        assert s.var2 == pytest.approx(np.var(x2))
        assert s.cov == pytest.approx(np.cov(x1, x2, bias=True)[0, 1])

    def test_merge_equals_concatenation(self):
        rng = np.random.default_rng(3)
        a1, a2 = rng.normal(size=50), rng.normal(size=50)
        b1, b2 = rng.normal(size=70), rng.normal(size=70)
        merged = stats_of(a1, a2).merge(stats_of(b1, b2))
        whole = stats_of(np.concatenate([a1, b1]), np.concatenate([a2, b2]))
        for attr in ("count", "sum1", "sum2", "sumsq1", "sumsq2", "sumprod"):
            assert getattr(merged, attr) == pytest.approx(getattr(whole, attr))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            PairStats().update([1.0, 2.0], [1.0])

    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=40))
    @settings(max_examples=50, deadline=None)
    def test_variances_nonnegative(self, vals):
        s = stats_of(vals, vals[::-1])
        assert s.var1 >= 0.0
        assert s.var2 >= 0.0


class TestPearson:
    def test_known_value(self):
        s = stats_of([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 0.0, 1.0])
        assert pearson(s) == pytest.approx(0.4472135954999579, abs=1e-12)

    def test_perfect_lines(self):
        x = np.arange(10.0)
        assert pearson(stats_of(x, 2 * x + 1)) == pytest.approx(1.0)
        assert pearson(stats_of(x, -3 * x + 7)) == pytest.approx(-1.0)

    def test_constant_series_raises(self):
        with pytest.raises(ConstantFeatureError):
            pearson(stats_of([1.0, 1.0, 1.0], [0.0, 1.0, 2.0]))

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            pearson(PairStats().update([1.0], [2.0]))


class TestMici:
    def test_known_value(self):
        # smaller eigenvalue of the covariance of the two series
        got = mici_series([0.0, 1.0, 2.0, 3.0], [0.0, 1.0, 0.0, 1.0])
        assert got == pytest.approx(0.19098300562505255, abs=1e-9)

    def test_zero_iff_perfectly_correlated(self):
        x = np.arange(20.0)
        assert mici_series(x, 5 * x - 2) == pytest.approx(0.0, abs=1e-12)
        assert mici_series(x, -x) == pytest.approx(0.0, abs=1e-12)

    def test_constant_series_is_redundant(self):
        assert mici_series([3.0, 3.0, 3.0], [0.0, 1.0, 2.0]) == 0.0

    def test_eigenvalue_identity(self):
        rng = np.random.default_rng(0)
        x1 = rng.normal(size=200)
        x2 = 0.3 * x1 + rng.normal(size=200)
        cov = np.cov(x1, x2, bias=True)
        smallest = np.linalg.eigvalsh(cov)[0]
        assert mici_series(x1, x2) == pytest.approx(smallest, abs=1e-9)

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_nonnegative_and_symmetric(self, seed):
        rng = np.random.default_rng(seed)
        x1 = rng.normal(size=30)
        x2 = rng.normal(size=30)
        g12 = mici_series(x1, x2)
        g21 = mici_series(x2, x1)
        assert g12 >= 0.0
        assert g12 == pytest.approx(g21, abs=1e-9)


class TestScoresAndWeights:
    def test_row_means_skip_diagonal(self):
        gamma = np.array([[9.0, 1.0, 3.0],
                          [1.0, 9.0, 5.0],
                          [3.0, 5.0, 9.0]])
        assert feature_scores(gamma) == pytest.approx([2.0, 3.0, 4.0])

    def test_single_feature_scores_one(self):
        assert feature_scores(np.zeros((1, 1))) == pytest.approx([1.0])

    def test_weights_normalized_to_max(self):
        w = input_weights(np.array([2.0, 4.0, 1.0]))
        assert w == pytest.approx([0.5, 1.0, 0.25])
        assert w.max() == 1.0

    def test_all_zero_scores_give_unit_weights(self):
        assert input_weights(np.zeros(4)) == pytest.approx(np.ones(4))

    def test_negative_scores_rejected(self):
        with pytest.raises(ValueError):
            input_weights(np.array([1.0, -0.1]))


class TestFeatureWeighter:
    def test_matches_pairwise_mici(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(300, 4))
        X[:, 3] = 0.9 * X[:, 0] + 0.1 * rng.normal(size=300)
        fw = FeatureWeighter(4)
        fw.update(X[:150])
        fw.update(X[150:])
        gamma = fw.gamma_matrix()
        for j in range(4):
            for k in range(4):
                if j != k:
                    assert gamma[j, k] == pytest.approx(
                        mici_series(X[:, j], X[:, k]), abs=1e-9)

    def test_redundant_feature_weighted_down(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(500, 3))
        X[:, 2] = X[:, 0]          # exact copy: fully redundant pair
        fw = FeatureWeighter(3)
        fw.update(X)
        w = fw.weights()
        assert w[1] == pytest.approx(1.0)
        assert w[0] < w[1]
        assert w[2] < w[1]

    def test_dead_feature_gets_zero_gamma(self):
        X = np.column_stack([np.arange(10.0), np.full(10, 2.0)])
        fw = FeatureWeighter(2)
        fw.update(X)
        gamma = fw.gamma_matrix()
        assert gamma[1].sum() == 0.0
        assert gamma[:, 1].sum() == 0.0

    def test_weights_in_unit_interval(self):
        rng = np.random.default_rng(1)
        fw = FeatureWeighter(5)
        for _ in range(10):
            fw.update(rng.normal(size=(40, 5)))
            w = fw.weights()
            assert np.all(w >= 0.0) and np.all(w <= 1.0)
            assert w.max() == pytest.approx(1.0)

    def test_before_data_weights_are_ones(self):
        assert FeatureWeighter(3).weights() == pytest.approx(np.ones(3))
