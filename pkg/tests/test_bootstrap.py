from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from ignis.bootstrap import BootstrapConfig, bootstrap_se, resample_features
from ignis.errors import DegenerateResample, TooFewObservations
from ignis.families import CopulaFamily
from ignis.features import feature_vector
from ignis.network import fit_scaler, init_model
from oracles import random_training_inputs


@pytest.fixture(scope="module")
def model():
    m = init_model(0)
    m.scaler = fit_scaler(random_training_inputs(np.random.default_rng(0), 50)[0])
    return m


class ConstantRng:
    """Stub whose integer draws are always the same index vector."""

    def __init__(self, idx):
        self.idx = np.asarray(idx)

    def integers(self, low, high, size):
        return self.idx[:size]


def test_config_validation():
    with pytest.raises(ValueError):
        BootstrapConfig(replicates=1)


def test_identical_resamples_give_zero_se(model):
    rng = np.random.default_rng(1)
    u, v = rng.random(20), rng.random(20)
    idx = np.arange(20)[::-1]
    _, se = bootstrap_se(u, v, CopulaFamily.A1, model, BootstrapConfig(2), rng=ConstantRng(idx))
    assert se == 0.0


def test_deterministic_and_positive(model):
    rng = np.random.default_rng(2)
    u, v = rng.random(300), rng.random(300)
    a = bootstrap_se(u, v, CopulaFamily.GUMBEL, model, BootstrapConfig(20, seed=5))
    b = bootstrap_se(u, v, CopulaFamily.GUMBEL, model, BootstrapConfig(20, seed=5))
    c = bootstrap_se(u, v, CopulaFamily.GUMBEL, model, BootstrapConfig(20, seed=6))
    assert a == b and a[1] > 0 and c != a


def test_point_estimate_on_original_data(model):
    from ignis.network import predict
    rng = np.random.default_rng(3)
    u, v = rng.random(100), rng.random(100)
    est, _ = bootstrap_se(u, v, CopulaFamily.A2, model, BootstrapConfig(3))
    assert est == pytest.approx(predict(model, u, v, CopulaFamily.A2), rel=1e-12)


def test_pairs_kept_together():
    # Each replicate is a multiset drawn from the original rows: recompute from recorded indices.
    rng = np.random.default_rng(4)
    u, v = rng.random(50), rng.random(50)
    draws = []

    class Recorder:
        def __init__(self):
            self.inner = np.random.default_rng(9)

        def integers(self, low, high, size):
            idx = self.inner.integers(low, high, size=size)
            draws.append(idx)
            return idx

    rows = resample_features(u, v, BootstrapConfig(4), rng=Recorder())
    original = Counter(zip(u.tolist(), v.tolist()))
    for idx, row in zip(draws, rows):
        rep = Counter(zip(u[idx].tolist(), v[idx].tolist()))
        assert all(original[k] >= 1 for k in rep)
        assert np.array_equal(row, feature_vector(u[idx], v[idx]).as_array())


def test_degenerate_resample_redraws_then_fails():
    u = np.arange(10.0)
    v = np.arange(10.0)
    with pytest.raises(DegenerateResample):
        resample_features(u, v, BootstrapConfig(2), rng=ConstantRng(np.zeros(10, dtype=int)))


def test_too_few(model):
    with pytest.raises(TooFewObservations):
        bootstrap_se(np.arange(9.0), np.arange(9.0), CopulaFamily.A1, model)
