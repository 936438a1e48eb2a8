"""Simulated training data, the end-to-end training driver and the
simulation study that regenerates the MoM and IGNIS result tables."""

from __future__ import annotations

import csv
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ignis.bootstrap import BootstrapConfig, bootstrap_se
from ignis.copula import sample_uv
from ignis.errors import DegenerateDerivative
from ignis.families import FAMILIES, CopulaFamily, random_source, theta_domain
from ignis.features import feature_vector, kendall_tau, onehot
from ignis.network import IgnisModel, TrainConfig, predict_features, train_arrays
from ignis.tau import mom_estimate, mom_se

log = logging.getLogger(__name__)

FEATURE_COLUMNS = ["tau", "rho", "tail", "pearson"] + [f"onehot{i}" for i in range(5)]
STUDY_THETAS = (2.0, 5.0, 10.0)

# Stream tags keep independent uses of one seed apart.
_TAG_TRAIN_ROW = 1
_TAG_STUDY = 2
_TAG_BOOT = 3


@dataclass(frozen=True)
class GenConfig:
    thetas_per_family: int = 200
    obs_per_theta: int = 2000
    families: tuple[CopulaFamily, ...] = FAMILIES
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if self.thetas_per_family < 1:
            raise ValueError("thetas_per_family must be >= 1")
        if self.obs_per_theta < 100:
            raise ValueError("obs_per_theta must be >= 100")
        object.__setattr__(self, "families", tuple(CopulaFamily.parse(f) for f in self.families))

    @classmethod
    def paper(cls, seed: int = 0) -> GenConfig:
        return cls(thetas_per_family=500, obs_per_theta=10_000, seed=seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["families"] = [f.value for f in self.families]
        return d


def _range_pieces(family) -> list[tuple[float, float]]:
    dom = theta_domain(family)
    if dom.train_excluded is None:
        return [(dom.train_lower, dom.train_upper)]
    lo, hi = dom.train_excluded
    return [(dom.train_lower, lo), (hi, dom.train_upper)]


def _uniform_to_theta(family, q: float) -> float:
    """Map q in [0, 1) to the training range by its (piecewise) uniform quantile."""
    pieces = _range_pieces(family)
    total = sum(b - a for a, b in pieces)
    x = q * total
    for a, b in pieces:
        if x < b - a:
            return a + x
        x -= b - a
    return pieces[-1][1]


def sample_theta(family, rng: np.random.Generator, stratum: int | None = None, strata: int = 1) -> float:
    """Uniform draw over the family's training range (Frank skips (-0.1, 0.1)).

    With ``stratum`` the draw is uniform within the ``stratum``-th of
    ``strata`` equal-probability slices, so a batch of ``strata`` draws covers
    the range without gaps while each draw stays marginally uniform when the
    stratum itself is uniform.
    """
    dom = theta_domain(family)
    while True:
        q = float(rng.random())
        if stratum is not None:
            q = (stratum + q) / strata
        theta = _uniform_to_theta(family, q)
        if dom.in_training_range(theta) and dom.contains(theta):
            return theta


def training_row(family: CopulaFamily, index: int, obs: int, seed: int,
                 strata: int | None = None) -> tuple[np.ndarray, float]:
    """Feature row and target for the ``index``-th theta draw of ``family``.

    The stream is keyed by (family, index) only, so a row never depends on
    which other rows were generated or in which order.  With ``strata`` the
    draw is confined to slice ``index`` of the training range.
    """
    rng = random_source(seed, _TAG_TRAIN_ROW, family.index, index)
    theta = sample_theta(family, rng) if strata is None else sample_theta(family, rng, index, strata)
    u, v = sample_uv(family, theta, obs, rng)
    f = feature_vector(u, v).as_array()
    return np.concatenate([f, onehot(family)]), theta


def _row_job(args):
    fam_value, index, obs, seed, strata = args
    return training_row(CopulaFamily(fam_value), index, obs, seed, strata)


@dataclass
class TrainingSet:
    x: np.ndarray
    theta: np.ndarray
    family: list[CopulaFamily]
    provenance: GenConfig | None = None

    def __len__(self) -> int:
        return self.x.shape[0]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(FEATURE_COLUMNS + ["theta", "family"])
            for row, th, fam in zip(self.x, self.theta, self.family):
                w.writerow([f"{v:.17g}" for v in row] + [f"{th:.17g}", fam.value])

    @classmethod
    def from_csv(cls, path: str | Path) -> TrainingSet:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(FEATURE_COLUMNS + ["theta", "family"]) - set(reader.fieldnames or [])
            if missing:
                raise ValueError(f"training set CSV lacks columns: {sorted(missing)}")
            rows = list(reader)
        x = np.array([[float(r[c]) for c in FEATURE_COLUMNS] for r in rows]).reshape(-1, len(FEATURE_COLUMNS))
        theta = np.array([float(r["theta"]) for r in rows])
        fams = [CopulaFamily.parse(r["family"]) for r in rows]
        return cls(x, theta, fams)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("IGNIS_THREADS", "1")))
    except ValueError:
        return 1


def build_training_set(cfg: GenConfig, workers: int | None = None) -> TrainingSet:
    """One row per (family, theta draw): simulate, extract features, encode.

    ``cfg.stratified`` draws the i-th theta of each family from the i-th of
    ``thetas_per_family`` equal slices of the training range.
    """
    strata = cfg.thetas_per_family if cfg.stratified else None
    jobs = [(f.value, i, cfg.obs_per_theta, cfg.seed, strata)
            for f in cfg.families for i in range(cfg.thetas_per_family)]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_row_job, jobs, chunksize=16))
    else:
        results = [_row_job(j) for j in jobs]
    x = np.array([r[0] for r in results])
    theta = np.array([r[1] for r in results])
    fams = [CopulaFamily(j[0]) for j in jobs]
    return TrainingSet(x, theta, fams, cfg)


def train_model(ts: TrainingSet, cfg: TrainConfig):
    return train_arrays(ts.x, ts.theta, cfg)


@dataclass
class StudyRow:
    method: str
    family: CopulaFamily
    theta: float
    n: int
    replicate: int
    theta_hat: float | None
    se: float | None
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "family": self.family.value,
            "theta": self.theta,
            "n": self.n,
            "replicate": self.replicate,
            "theta_hat": self.theta_hat,
            "se": self.se,
            "note": self.note,
        }


@dataclass
class StudyTable:
    rows: list[StudyRow] = field(default_factory=list)

    def select(self, method: str) -> list[StudyRow]:
        return [r for r in self.rows if r.method == method]

    def to_csv(self, path: str | Path, method: str | None = None) -> None:
        rows = self.rows if method is None else self.select(method)
        cols = ["method", "family", "theta", "n", "replicate", "theta_hat", "se", "note"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            for r in rows:
                d = r.as_dict()
                d["theta_hat"] = "" if d["theta_hat"] is None else f"{d['theta_hat']:.10g}"
                d["se"] = "" if d["se"] is None else f"{d['se']:.10g}"
                w.writerow(d)


def ignis_cell(model: IgnisModel, family: CopulaFamily, theta: float, n: int, seed: int, key: Sequence[int],
               bootstrap: BootstrapConfig | None) -> StudyRow:
    rng = random_source(seed, _TAG_STUDY, *key)
    u, v = sample_uv(family, theta, n, rng)
    if bootstrap is not None:
        est, se = bootstrap_se(u, v, family, model, bootstrap)
    else:
        est, se = float(predict_features(model, feature_vector(u, v).as_array(), family)[0]), None
    note = "frank |theta_hat| < 0.1" if family is CopulaFamily.FRANK and abs(est) < 0.1 else ""
    return StudyRow("ignis", family, theta, n, key[-1], est, se, note)


def mom_cell(family: CopulaFamily, theta: float, n: int, seed: int, key: Sequence[int]) -> list[StudyRow]:
    rng = random_source(seed, _TAG_STUDY, *key)
    u, v = sample_uv(family, theta, n, rng)
    res = mom_estimate(family, kendall_tau(u, v))
    if not res.feasible:
        return [StudyRow("mom", family, theta, n, key[-1], None, None, "infeasible")]
    rows = []
    for root in res.roots:
        try:
            se, note = mom_se(family, u, v, root), ""
        except DegenerateDerivative:
            se, note = None, "flat tau curve"
        if len(res.roots) > 1:
            note = (note + "; " if note else "") + f"{len(res.roots)} roots"
        rows.append(StudyRow("mom", family, theta, n, key[-1], root, se, note))
    return rows


def run_simulation_study(
    model: IgnisModel | None,
    thetas: Sequence[float] = STUDY_THETAS,
    n: int = 10_000,
    replicates: int = 1,
    seed: int = 0,
    families: Sequence[CopulaFamily] = FAMILIES,
    mom_families: Sequence[CopulaFamily] = (CopulaFamily.A1, CopulaFamily.A2),
    mom_n: int = 100_000,
    bootstrap: BootstrapConfig | None = BootstrapConfig(),
) -> StudyTable:
    """IGNIS estimates (with bootstrap SE) per (family, theta) and MoM rows.

    Each cell draws from its own stream keyed by (method, family, theta index,
    replicate), so cells are reproducible in isolation.
    """
    table = StudyTable()
    for rep in range(replicates):
        for ti, theta in enumerate(thetas):
            if model is not None:
                for fam in families:
                    fam = CopulaFamily.parse(fam)
                    boot = None if bootstrap is None else BootstrapConfig(
                        bootstrap.replicates, int(random_source(bootstrap.seed, _TAG_BOOT, fam.index, ti, rep).integers(2**62)))
                    table.rows.append(ignis_cell(model, fam, float(theta), n, seed, (0, fam.index, ti, rep), boot))
                    log.info("ignis %s theta=%g rep=%d -> %s", fam.value, theta, rep, table.rows[-1].theta_hat)
            for fam in mom_families:
                fam = CopulaFamily.parse(fam)
                table.rows.extend(mom_cell(fam, float(theta), mom_n, seed, (1, fam.index, ti, rep)))
    return table
