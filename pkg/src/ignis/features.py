"""Empirical dependence measures and the 9-dimensional network input."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ignis.errors import DegenerateInput, LengthMismatch, TooFewObservations
from ignis.families import FAMILIES, CopulaFamily

DEFAULT_TAIL_Q = 0.95


def _pair(x, y, minimum: int = 2) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise LengthMismatch(f"lengths differ: {x.size} vs {y.size}")
    if x.size < minimum:
        raise TooFewObservations(f"need at least {minimum} observations, got {x.size}")
    return x, y


def pseudo_observations(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Rank-transform each coordinate to rank/(n+1) with average ranks for ties."""
    x, y = _pair(x, y)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DegenerateInput("pseudo-observations need finite values")
    n1 = x.size + 1.0
    return rankdata(x) / n1, rankdata(y) / n1


def _earlier_counts(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per position j: #{i < j : a_i < a_j} and #{i < j : a_i > a_j}.

    Bottom-up merge sort over integer codes.  At each level the left run of
    every block is already sorted, so one ``searchsorted`` over block-offset
    keys counts, for all right-run elements at once, how many left-run
    elements lie strictly below and strictly above them.
    """
    codes = np.unique(a, return_inverse=True)[1].astype(np.int64)
    n = codes.size
    m = int(codes.max()) + 1 if n else 1
    less = np.zeros(n, dtype=np.int64)
    greater = np.zeros(n, dtype=np.int64)
    vals = codes.copy()
    pos = np.arange(n)  # original index of the element currently at each slot
    slot = np.arange(n)
    width = 1
    while width < n:
        block = slot // (2 * width)
        right = (slot // width) % 2 == 1
        keys = block * m + vals
        left_keys = keys[~right]
        rb = block[right]
        rv = vals[right]
        start = np.searchsorted(left_keys, rb * m, side="left")
        stop = np.searchsorted(left_keys, (rb + 1) * m, side="left")
        lo = np.searchsorted(left_keys, rb * m + rv, side="left")
        hi = np.searchsorted(left_keys, rb * m + rv, side="right")
        rp = pos[right]
        less[rp] += lo - start
        greater[rp] += stop - hi
        order = np.argsort(keys, kind="stable")
        vals = vals[order]
        pos = pos[order]
        width *= 2
    return less, greater


def _tie_pairs(*cols: np.ndarray) -> int:
    """Number of pairs tied jointly in all given columns."""
    order = np.lexsort(cols[::-1])
    same = np.ones(order.size - 1, dtype=bool)
    for c in cols:
        sc = c[order]
        same &= sc[1:] == sc[:-1]
    # run lengths of consecutive equal rows
    edges = np.flatnonzero(np.diff(np.concatenate([[0], same.astype(np.int8), [0]])))
    runs = edges[1::2] - edges[0::2] + 1
    return int(np.sum(runs * (runs - 1) // 2))


def concordance_counts(u, v) -> tuple[int, int, int, int]:
    """(S, n0 - n1, n0 - n2, n0) for tau-b, where S = concordant - discordant.

    n0 = n(n-1)/2, n1/n2 = pairs tied in u/v.  Integer-valued so that any
    exact pair-counting routine yields identical tau-b.
    """
    u, v = _pair(u, v)
    n = u.size
    n0 = n * (n - 1) // 2
    order = np.lexsort((v, u))
    _, greater = _earlier_counts(v[order])
    swaps = int(greater.sum())
    n1 = _tie_pairs(u)
    n2 = _tie_pairs(v)
    n3 = _tie_pairs(u, v)
    s = n0 - n1 - n2 + n3 - 2 * swaps
    return s, n0 - n1, n0 - n2, n0


def tau_b_from_counts(s: int, nu: int, nv: int) -> float:
    if nu == 0 or nv == 0:
        raise DegenerateInput("Kendall's tau is undefined for a constant coordinate")
    return float(np.clip(s / np.sqrt(float(nu) * float(nv)), -1.0, 1.0))


def kendall_tau(u, v) -> float:
    """Tie-adjusted Kendall tau-b in O(n log n)."""
    s, nu, nv, _ = concordance_counts(u, v)
    return tau_b_from_counts(s, nu, nv)


def pointwise_concordance(u, v) -> np.ndarray:
    """c_i = sum_j sign(u_i - u_j) * sign(v_i - v_j) for every i.

    Built from four strict dominance counts, each obtained by sorting on the
    first coordinate (ties ordered so they never count) and counting earlier
    strictly smaller second coordinates.
    """
    u, v = _pair(u, v)

    def dominated(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # #{j : a_j < a_i and b_j < b_i}
        order = np.lexsort((-b, a))
        less, _ = _earlier_counts(b[order])
        out = np.empty_like(less)
        out[order] = less
        return out

    return dominated(u, v) + dominated(-u, -v) - dominated(u, -v) - dominated(-u, v)


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx <= 0.0 or syy <= 0.0:
        raise DegenerateInput("correlation is undefined for a constant coordinate")
    return float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))


def spearman_rho(u, v) -> float:
    """Pearson correlation of average ranks."""
    u, v = _pair(u, v)
    return _pearson(rankdata(u), rankdata(v))


def pearson_corr(x, y) -> float:
    x, y = _pair(x, y)
    return _pearson(x, y)


def tail_dependence(u, v, q: float = DEFAULT_TAIL_Q) -> float:
    """Upper-tail ratio #{u > q and v > q} / #{u > q}; 0 when no u exceeds q."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    u, v = _pair(u, v)
    upper = u > q
    k = int(upper.sum())
    if k == 0:
        return 0.0
    return int(np.sum(upper & (v > q))) / k


@dataclass(frozen=True)
class FeatureVector:
    tau: float
    rho: float
    tail: float
    pearson: float

    def __post_init__(self):
        vals = self.as_array()
        if not np.all(np.isfinite(vals)):
            raise DegenerateInput(f"non-finite feature in {vals}")
        if not 0.0 <= self.tail <= 1.0:
            raise DegenerateInput(f"tail dependence {self.tail} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.tau, self.rho, self.tail, self.pearson], dtype=float)

    def __len__(self) -> int:
        return 4


def feature_vector(u, v, q: float = DEFAULT_TAIL_Q) -> FeatureVector:
    """(tau, rho, tail, pearson) of the pairs exactly as given."""
    u, v = _pair(u, v)
    return FeatureVector(kendall_tau(u, v), spearman_rho(u, v), tail_dependence(u, v, q), pearson_corr(u, v))


def onehot(family: CopulaFamily | str) -> np.ndarray:
    code = np.zeros(len(FAMILIES))
    code[CopulaFamily.parse(family).index] = 1.0
    return code


@dataclass(frozen=True)
class ModelInput:
    features: FeatureVector
    family: CopulaFamily

    @property
    def onehot(self) -> np.ndarray:
        return onehot(self.family)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.features.as_array(), self.onehot])

    def __len__(self) -> int:
        return 9


def encode_input(f: FeatureVector, family: CopulaFamily | str) -> ModelInput:
    return ModelInput(f, CopulaFamily.parse(family))
