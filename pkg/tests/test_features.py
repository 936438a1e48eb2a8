from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from ignis.copula import sample_uv
from ignis.errors import DegenerateInput, LengthMismatch, TooFewObservations
from ignis.families import FAMILIES, CopulaFamily, random_source
from ignis.features import (
    FeatureVector,
    concordance_counts,
    encode_input,
    feature_vector,
    kendall_tau,
    onehot,
    pearson_corr,
    pointwise_concordance,
    pseudo_observations,
    spearman_rho,
    tail_dependence,
)
from oracles import brute_concordance, brute_tau_b, random_tau_instance


class TestPseudoObservations:
    def test_examples(self):
        u, _ = pseudo_observations([3, 1, 2], [1, 2, 3])
        assert u.tolist() == [0.75, 0.25, 0.5]
        u, _ = pseudo_observations([5, 5], [1, 2])
        assert u.tolist() == [0.5, 0.5]

    def test_monotone_input(self):
        u, _ = pseudo_observations(np.arange(10.0) ** 3, np.zeros(10) + np.arange(10))
        assert np.all(np.diff(u) > 0)
        assert np.array_equal(u, np.arange(1, 11) / 11)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            pseudo_observations([1, 2], [1, 2, 3])
        with pytest.raises(TooFewObservations):
            pseudo_observations([1], [1])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50))
    def test_strictly_inside_unit(self, xs):
        u, v = pseudo_observations(xs, xs[::-1])
        assert np.all((u > 0) & (u < 1)) and np.all((v > 0) & (v < 1))


class TestKendall:
    def test_examples(self):
        x = np.arange(20.0)
        assert kendall_tau(x, x) == 1.0
        assert kendall_tau(x, -x) == -1.0
        assert kendall_tau([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(2 / 3, abs=1e-15)

    def test_matches_brute_force_exactly(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            u, v = random_tau_instance(rng)
            s, nu, nv, _ = concordance_counts(u, v)
            assert (s, nu, nv) == brute_concordance(u, v)
            assert kendall_tau(u, v) == brute_tau_b(u, v)

    def test_matches_scipy(self):
        rng = np.random.default_rng(7)
        u = rng.integers(0, 30, 3000).astype(float)
        v = u + rng.integers(0, 30, 3000)
        assert kendall_tau(u, v) == pytest.approx(stats.kendalltau(u, v).statistic, abs=1e-12)

    def test_constant_coordinate(self):
        with pytest.raises(DegenerateInput):
            kendall_tau([1, 1, 1], [1, 2, 3])

    def test_pointwise_concordance(self):
        rng = np.random.default_rng(3)
        u = rng.integers(0, 8, 150).astype(float)
        v = rng.integers(0, 8, 150).astype(float)
        ref = np.sum(np.sign(u[:, None] - u[None, :]) * np.sign(v[:, None] - v[None, :]), axis=1)
        assert np.array_equal(pointwise_concordance(u, v), ref)


class TestOtherMeasures:
    def test_spearman_examples(self):
        x = np.arange(10.0)
        assert spearman_rho(x, x) == pytest.approx(1.0)
        assert spearman_rho(x, -x) == pytest.approx(-1.0)
        assert spearman_rho([1, 2, 3], [2, 1, 3]) == pytest.approx(0.5)

    def test_spearman_matches_scipy(self):
        rng = np.random.default_rng(9)
        u, v = rng.random(500), rng.integers(0, 20, 500)
        assert spearman_rho(u, v) == pytest.approx(stats.spearmanr(u, v).statistic, abs=1e-12)

    def test_pearson_examples(self):
        x = np.arange(10.0)
        assert pearson_corr(x, 2 * x + 1) == pytest.approx(1.0)
        assert pearson_corr(x, -x) == pytest.approx(-1.0)
        assert pearson_corr([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9820, abs=1e-4)

    def test_degenerate(self):
        with pytest.raises(DegenerateInput):
            spearman_rho([1, 1, 1], [1, 2, 3])
        with pytest.raises(DegenerateInput):
            pearson_corr([1, 2, 3], [4, 4, 4])

    def test_tail_comonotone(self):
        u = np.linspace(0.01, 0.99, 99)
        assert tail_dependence(u, u) == 1.0

    def test_tail_empty_upper_set(self):
        assert tail_dependence([0.1, 0.2], [0.3, 0.4]) == 0.0

    def test_tail_independent(self):
        rng = random_source(1)
        u, v = rng.random(100_000), rng.random(100_000)
        assert tail_dependence(u, v) == pytest.approx(0.05, abs=0.01)

    def test_tail_gumbel(self):
        u, v = sample_uv(CopulaFamily.GUMBEL, 2.0, 100_000, random_source(2))
        assert tail_dependence(u, v) == pytest.approx(0.55, abs=0.05)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(0.001, 0.999), st.floats(0.001, 0.999)), min_size=2, max_size=60),
           st.floats(0.05, 0.95))
    def test_tail_in_unit_interval(self, pairs, q):
        u, v = np.array(pairs).T
        assert 0.0 <= tail_dependence(u, v, q) <= 1.0


class TestFeatureVector:
    def test_comonotone(self):
        u = np.linspace(0.001, 0.999, 500)
        f = feature_vector(u, u)
        assert (f.tau, f.rho, f.tail) == (1.0, pytest.approx(1.0), 1.0)
        assert f.pearson == pytest.approx(1.0)
        assert len(f) == 4 and f.as_array().shape == (4,)

    def test_independent(self):
        rng = random_source(5)
        f = feature_vector(rng.random(100_000), rng.random(100_000))
        assert np.allclose(f.as_array(), [0, 0, 0.05, 0], atol=0.01)

    def test_monotone_invariance(self):
        u, v = sample_uv(CopulaFamily.CLAYTON, 3.0, 2000, random_source(6))
        a = feature_vector(*pseudo_observations(u, v)).as_array()
        b = feature_vector(*pseudo_observations(np.exp(5 * u), v ** 3 - 7)).as_array()
        assert np.array_equal(a, b)

    def test_non_finite_rejected(self):
        with pytest.raises(DegenerateInput):
            FeatureVector(np.nan, 0, 0, 0)


class TestEncoding:
    def test_order(self):
        f = FeatureVector(0.1, 0.2, 0.3, 0.4)
        assert encode_input(f, "clayton").vector.tolist() == [0.1, 0.2, 0.3, 0.4, 1, 0, 0, 0, 0]
        assert encode_input(f, "a2").vector.tolist() == [0.1, 0.2, 0.3, 0.4, 0, 0, 0, 0, 1]

    @pytest.mark.parametrize("family", FAMILIES)
    def test_onehot_sums_to_one(self, family):
        assert onehot(family).sum() == 1.0
        assert len(encode_input(FeatureVector(0, 0, 0, 0), family)) == 9
