"""IGNIS: neural estimation of Archimedean copula parameters."""

from ignis.copula import generator, inv_generator, kendall_K, sample_n, sample_uv
from ignis.families import FAMILIES, CopulaFamily, theta_domain
from ignis.features import feature_vector, kendall_tau
from ignis.network import IgnisModel, TrainConfig, load_model, predict, save_model
from ignis.tau import mom_estimate, mom_se, theoretical_tau

__all__ = [
    "FAMILIES",
    "CopulaFamily",
    "IgnisModel",
    "TrainConfig",
    "feature_vector",
    "generator",
    "inv_generator",
    "kendall_K",
    "kendall_tau",
    "load_model",
    "mom_estimate",
    "mom_se",
    "predict",
    "sample_n",
    "sample_uv",
    "save_model",
    "theoretical_tau",
    "theta_domain",
]

__version__ = "0.1.0"
