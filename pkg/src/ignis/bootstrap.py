"""Nonparametric pair bootstrap for IGNIS standard errors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ignis.errors import DegenerateInput, DegenerateResample, TooFewObservations
from ignis.families import random_source
from ignis.features import _pair, feature_vector

MAX_REDRAWS = 10


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.replicates < 2:
            raise ValueError("bootstrap needs at least 2 replicates")


def resample_features(u, v, cfg: BootstrapConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Feature rows of ``cfg.replicates`` with-replacement resamples of the pairs.

    A replicate whose features are undefined (a constant coordinate) is
    redrawn up to ``MAX_REDRAWS`` times.
    """
    u, v = _pair(u, v)
    n = u.size
    rng = random_source(cfg.seed) if rng is None else rng
    rows = np.empty((cfg.replicates, 4))
    for b in range(cfg.replicates):
        for _ in range(MAX_REDRAWS + 1):
            idx = rng.integers(0, n, size=n)
            try:
                rows[b] = feature_vector(u[idx], v[idx]).as_array()
                break
            except DegenerateInput:
                continue
        else:
            raise DegenerateResample(f"replicate {b} degenerate after {MAX_REDRAWS} redraws")
    return rows


def bootstrap_se(u, v, family, model, cfg: BootstrapConfig = BootstrapConfig(),
                 rng: np.random.Generator | None = None) -> tuple[float, float]:
    """(theta_hat on the original pairs, SD of theta_hat over resamples).

    The SD uses the B - 1 denominator.
    """
    from ignis.network import predict_features

    u, v = _pair(u, v)
    if u.size < 10:
        raise TooFewObservations(f"bootstrap needs n >= 10, got {u.size}")
    theta_hat = float(predict_features(model, feature_vector(u, v).as_array(), family)[0])
    preds = predict_features(model, resample_features(u, v, cfg, rng), family)
    return theta_hat, float(np.std(preds, ddof=1))
