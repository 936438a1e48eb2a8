"""The IGNIS multilayer perceptron in plain numpy (float64 throughout).

Layout: 9 -> 128 -> 128 -> 64 -> 1 with ReLU hidden layers and a linear
output, followed by a family-specific constraint head:

    clayton            softplus(raw)
    gumbel / a1 / a2   softplus(raw) + 1
    frank              20 * tanh(raw)

Weights are stored as (out, in) matrices so a layer computes W @ x + b.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ignis.errors import EmptyBatch, FormatError, ScalerUnset, TooFewObservations
from ignis.families import FAMILIES, CopulaFamily, random_source
from ignis.features import ModelInput, encode_input, feature_vector

LAYER_SIZES = (9, 128, 128, 64, 1)
STD_FLOOR = 1e-8
FORMAT_VERSION = "v1"
FRANK_SCALE = 20.0
_FRANK_MAX = float(np.nextafter(FRANK_SCALE, 0.0))
_TINY = float(np.finfo(float).tiny)

_SOFTPLUS = np.array([f is not CopulaFamily.FRANK for f in FAMILIES])
_OFFSET = np.array([0.0 if f in (CopulaFamily.CLAYTON, CopulaFamily.FRANK) else 1.0 for f in FAMILIES])


@dataclass
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std

    def inverse(self, z: np.ndarray) -> np.ndarray:
        return z * self.std + self.mean


@dataclass
class IgnisModel:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    scaler: Scaler | None = None
    seed: int = 0
    epochs_trained: int = 0
    final_val_loss: float = math.nan

    @property
    def shapes(self) -> list[tuple[int, int]]:
        return [w.shape for w in self.weights]

    def copy(self) -> IgnisModel:
        return copy.deepcopy(self)


@dataclass
class TrainConfig:
    learning_rate: float = 0.0005
    batch_size: int = 32
    max_epochs: int = 500
    patience: int = 20
    val_fraction: float = 0.2
    seed: int = 0
    constrain_in_loss: bool = True

    def __post_init__(self):
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in (0, 1)")
        if self.patience < 1 or self.batch_size < 1 or self.max_epochs < 1:
            raise ValueError("patience, batch_size and max_epochs must be positive")


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros_like(cls, params: Sequence[np.ndarray]) -> AdamState:
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params])

    def update(self, params: list[np.ndarray], grads: Sequence[np.ndarray], lr: float) -> None:
        """In-place Adam step with bias-corrected moments."""
        self.step += 1
        c1 = 1.0 - self.beta1 ** self.step
        c2 = 1.0 - self.beta2 ** self.step
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class History:
    epoch: list[int] = field(default_factory=list)
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = 0

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_loss,val_loss\n")
            for e, a, b in zip(self.epoch, self.train_loss, self.val_loss):
                fh.write(f"{e},{a:.17g},{b:.17g}\n")


def init_model(seed: int) -> IgnisModel:
    """He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases."""
    rng = random_source(seed, 0x1A11)
    weights, biases = [], []
    for fan_in, fan_out in zip(LAYER_SIZES[:-1], LAYER_SIZES[1:]):
        limit = math.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return IgnisModel(weights, biases, seed=int(seed))


def _as_matrix(inputs) -> np.ndarray:
    if isinstance(inputs, ModelInput):
        return inputs.vector[None, :]
    if isinstance(inputs, np.ndarray):
        return np.atleast_2d(inputs.astype(float))
    return np.array([x.vector if isinstance(x, ModelInput) else x for x in inputs], dtype=float)


def family_codes(x: np.ndarray) -> np.ndarray:
    """Family index of each row, read from the (unscaled) one-hot block."""
    return np.argmax(np.atleast_2d(x)[:, 4:9], axis=1)


def fit_scaler(inputs) -> Scaler:
    """Population mean/std per coordinate; std floored at 1e-8."""
    x = _as_matrix(inputs)
    if x.shape[0] < 2:
        raise TooFewObservations("fit_scaler needs at least 2 inputs")
    return Scaler(x.mean(axis=0), np.maximum(x.std(axis=0), STD_FLOOR))


def _forward_cache(model: IgnisModel, z: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    acts = [z]
    h = z
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        pre = h @ w.T + b
        h = pre if i == last else np.maximum(pre, 0.0)
        acts.append(h)
    return h[:, 0], acts


def _scaled(model: IgnisModel, x: np.ndarray) -> np.ndarray:
    if model.scaler is None:
        raise ScalerUnset("the model's input scaler has not been fitted")
    return model.scaler.transform(x)


def forward(model: IgnisModel, x) -> np.ndarray | float:
    """Raw (unconstrained) network output for one input or a batch."""
    single = isinstance(x, ModelInput) or (isinstance(x, np.ndarray) and x.ndim == 1)
    raw, _ = _forward_cache(model, _scaled(model, _as_matrix(x)))
    return float(raw[0]) if single else raw


def _softplus(r: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, r)


def _sigmoid(r: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * r))


def _head(raw: np.ndarray, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Constrained value and its derivative w.r.t. raw."""
    raw = np.asarray(raw, dtype=float)
    sp = _SOFTPLUS[codes]
    th = np.tanh(raw)
    value = np.where(sp, _softplus(raw) + _OFFSET[codes], FRANK_SCALE * th)
    # keep saturated heads strictly inside the open parts of each domain
    value = np.where(sp, np.maximum(value, _TINY), np.clip(value, -_FRANK_MAX, _FRANK_MAX))
    deriv = np.where(sp, _sigmoid(raw), FRANK_SCALE * (1.0 - th * th))
    return value, deriv


def constrain(raw, family) -> np.ndarray | float:
    """Map raw outputs into the family's parameter domain."""
    if isinstance(family, (str, CopulaFamily)):
        codes = np.full(np.shape(raw), CopulaFamily.parse(family).index)
    else:
        codes = np.asarray(family, dtype=int)
    value, _ = _head(np.asarray(raw, dtype=float), codes)
    return float(value) if np.ndim(value) == 0 else value


def _batch_arrays(batch) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(batch, tuple) and len(batch) == 2 and isinstance(batch[0], np.ndarray):
        x, y = batch
    else:
        if len(batch) == 0:
            raise EmptyBatch("empty batch")
        x = _as_matrix([item[0] for item in batch])
        y = np.array([item[1] for item in batch], dtype=float)
    x = np.atleast_2d(x)
    if x.shape[0] == 0:
        raise EmptyBatch("empty batch")
    return x, np.asarray(y, dtype=float)


def _loss_and_grads(model, x, y, codes, constrain_in_loss=True, need_grads=True):
    raw, acts = _forward_cache(model, _scaled(model, x))
    m = x.shape[0]
    if constrain_in_loss:
        pred, dpred = _head(raw, codes)
    else:
        pred, dpred = raw, np.ones_like(raw)
    resid = pred - y
    loss = float(np.mean(resid * resid))
    if not need_grads:
        return loss, None
    delta = (2.0 / m) * resid * dpred
    delta = delta[:, None]
    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.weights)
    for i in range(len(model.weights) - 1, -1, -1):
        grads_w[i] = delta.T @ acts[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ model.weights[i]) * (acts[i] > 0.0)
    return loss, list(zip(grads_w, grads_b))


def loss(model: IgnisModel, batch, constrain_in_loss: bool = True) -> float:
    """Mean squared error between constrained predictions and true theta.

    ``batch`` is a list of (ModelInput, theta_true) or an (X, y) array pair.
    """
    x, y = _batch_arrays(batch)
    value, _ = _loss_and_grads(model, x, y, family_codes(x), constrain_in_loss, need_grads=False)
    return value


def backward(model: IgnisModel, batch, constrain_in_loss: bool = True) -> list[tuple[np.ndarray, np.ndarray]]:
    """Gradients of :func:`loss` as a list of (dW, db) per layer."""
    x, y = _batch_arrays(batch)
    _, grads = _loss_and_grads(model, x, y, family_codes(x), constrain_in_loss)
    return grads


def _params(model: IgnisModel) -> list[np.ndarray]:
    out = []
    for w, b in zip(model.weights, model.biases):
        out.extend((w, b))
    return out


def train_arrays(x: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> tuple[IgnisModel, History]:
    """Mini-batch Adam with early stopping on a held-out split.

    Returns the snapshot with the lowest validation loss.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    if n < 10:
        raise TooFewObservations(f"training needs at least 10 rows, got {n}")
    rng = random_source(cfg.seed, 0x7EA1)
    perm = rng.permutation(n)
    n_val = min(max(1, int(round(cfg.val_fraction * n))), n - 1)
    val_idx, tr_idx = perm[:n_val], perm[n_val:]
    x_tr, y_tr, c_tr = x[tr_idx], y[tr_idx], family_codes(x[tr_idx])
    x_val, y_val, c_val = x[val_idx], y[val_idx], family_codes(x[val_idx])

    model = init_model(cfg.seed)
    model.scaler = fit_scaler(x_tr)
    params = _params(model)
    adam = AdamState.zeros_like(params)
    history = History()
    best = model.copy()
    best_val = math.inf
    stale = 0
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(x_tr.shape[0])
        for start in range(0, order.size, cfg.batch_size):
            b = order[start:start + cfg.batch_size]
            _, grads = _loss_and_grads(model, x_tr[b], y_tr[b], c_tr[b], cfg.constrain_in_loss)
            flat = [g for pair in grads for g in pair]
            adam.update(params, flat, cfg.learning_rate)
        tr_loss, _ = _loss_and_grads(model, x_tr, y_tr, c_tr, cfg.constrain_in_loss, need_grads=False)
        val_loss, _ = _loss_and_grads(model, x_val, y_val, c_val, cfg.constrain_in_loss, need_grads=False)
        history.epoch.append(epoch)
        history.train_loss.append(tr_loss)
        history.val_loss.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best = model.copy()
            history.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    best.epochs_trained = len(history.epoch)
    best.final_val_loss = best_val
    return best, history


def train(dataset, cfg: TrainConfig) -> tuple[IgnisModel, History]:
    """Train on a list of (ModelInput, theta_true) pairs or an (X, y) tuple."""
    x, y = _batch_arrays(dataset)
    return train_arrays(x, y, cfg)


def predict_features(model: IgnisModel, features: np.ndarray, family) -> np.ndarray:
    """Constrained estimates for rows of 4 dependence features, one family."""
    fam = CopulaFamily.parse(family)
    f = np.atleast_2d(np.asarray(features, dtype=float))
    oh = np.zeros((f.shape[0], len(FAMILIES)))
    oh[:, fam.index] = 1.0
    raw = forward(model, np.hstack([f, oh]))
    return constrain(np.atleast_1d(raw), fam)


def predict(model: IgnisModel, u, v, family) -> float:
    """theta estimate for bivariate data (u, v) under ``family``."""
    fam = CopulaFamily.parse(family)
    return float(constrain(forward(model, encode_input(feature_vector(u, v), fam)), fam))


# ----------------------------------------------------------------------------
# persistence
# ----------------------------------------------------------------------------

def _fmt(values) -> str:
    return " ".join(f"{float(x):.17g}" for x in np.ravel(values))


def save_model(model: IgnisModel, path: str | Path) -> None:
    if model.scaler is None:
        raise ScalerUnset("refusing to save a model without a fitted scaler")
    lines = [
        f"IGNIS {FORMAT_VERSION}",
        "shapes " + " ".join(f"{r}x{c}" for r, c in model.shapes),
        "scaler_mean " + _fmt(model.scaler.mean),
        "scaler_std " + _fmt(model.scaler.std),
        f"seed {model.seed}",
        f"epochs_trained {model.epochs_trained}",
        f"final_val_loss {model.final_val_loss:.17g}",
    ]
    for i, (w, b) in enumerate(zip(model.weights, model.biases), start=1):
        lines.append(f"W{i}")
        lines.extend(_fmt(row) for row in w)
        lines.append(f"b{i}")
        lines.append(_fmt(b))
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _floats(line: str, expected: int, what: str) -> np.ndarray:
    try:
        vals = np.array([float(tok) for tok in line.split()], dtype=float)
    except ValueError as exc:
        raise FormatError(f"{what}: {exc}") from None
    if vals.size != expected:
        raise FormatError(f"{what}: expected {expected} values, found {vals.size}")
    return vals


def _keyed(line: str, key: str) -> str:
    head, _, rest = line.partition(" ")
    if head != key:
        raise FormatError(f"expected '{key}' line, found {line[:40]!r}")
    return rest


def load_model(path: str | Path) -> IgnisModel:
    """Read a model written by :func:`save_model`.

    Raises FormatError for any structural problem (bad magic, version,
    shapes, truncation); OSError propagates for unreadable files.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    it = iter(lines)

    def nxt(what: str) -> str:
        try:
            return next(it)
        except StopIteration:
            raise FormatError(f"truncated model file: missing {what}") from None

    header = nxt("header").split()
    if len(header) != 2 or header[0] != "IGNIS":
        raise FormatError(f"bad magic: expected 'IGNIS {FORMAT_VERSION}', found {' '.join(header)!r}")
    if header[1] != FORMAT_VERSION:
        raise FormatError(f"unsupported version: expected {FORMAT_VERSION}, found {header[1]}")
    try:
        shapes = [tuple(int(d) for d in tok.split("x")) for tok in _keyed(nxt("shapes"), "shapes").split()]
    except ValueError:
        raise FormatError("malformed shapes line") from None
    expected = [(o, i) for i, o in zip(LAYER_SIZES[:-1], LAYER_SIZES[1:])]
    if shapes != expected:
        raise FormatError(f"shape mismatch: expected {expected}, found {shapes}")
    mean = _floats(_keyed(nxt("scaler_mean"), "scaler_mean"), LAYER_SIZES[0], "scaler_mean")
    std = _floats(_keyed(nxt("scaler_std"), "scaler_std"), LAYER_SIZES[0], "scaler_std")
    if np.any(std <= 0):
        raise FormatError("scaler_std must be positive")
    try:
        seed = int(_keyed(nxt("seed"), "seed"))
        epochs = int(_keyed(nxt("epochs_trained"), "epochs_trained"))
        val = float(_keyed(nxt("final_val_loss"), "final_val_loss"))
    except ValueError:
        raise FormatError("malformed metadata line") from None
    weights, biases = [], []
    for i, (rows, cols) in enumerate(shapes, start=1):
        if nxt(f"W{i}").strip() != f"W{i}":
            raise FormatError(f"expected block W{i}")
        w = np.vstack([_floats(nxt(f"W{i} row"), cols, f"W{i} row") for _ in range(rows)])
        if nxt(f"b{i}").strip() != f"b{i}":
            raise FormatError(f"expected block b{i}")
        b = _floats(nxt(f"b{i} values"), rows, f"b{i}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise FormatError(f"non-finite parameters in layer {i}")
        weights.append(w)
        biases.append(b)
    if nxt("end marker").strip() != "end":
        raise FormatError("missing end marker")
    return IgnisModel(weights, biases, Scaler(mean, std), seed, epochs, val)
