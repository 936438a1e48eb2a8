"""Archimedean generators, the Kendall distribution and conditional sampling.

All numerical kernels are vectorised over ``t``.  Public functions validate
their arguments and raise :class:`~ignis.errors.DomainError`; the underscore
variants skip validation for use in inner loops.

Generator forms (x = t**(1/theta) where relevant)::

    clayton  (t**-theta - 1) / theta
    gumbel   (-ln t)**theta
    frank    -ln[(exp(-theta t) - 1) / (exp(-theta) - 1)]
    a1       (x + 1/x - 2)**theta
    a2       ((1 - t)**2 / t)**theta
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ignis.errors import ConvergenceError, DomainError
from ignis.families import CopulaFamily, random_source, theta_domain

EPS = 1e-12
_BISECT_MAX_ITER = 200


def _log_abs_expm1(x: np.ndarray) -> np.ndarray:
    """log|exp(x) - 1| without overflow for large positive x."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    big = x > 30.0
    out[big] = x[big] + np.log1p(-np.exp(-x[big]))
    out[~big] = np.log(np.abs(np.expm1(x[~big])))
    return out


def _frank_phi(theta: float, t: np.ndarray) -> np.ndarray:
    """-log(expm1(-theta t) / expm1(-theta)).

    Near t = 1 the ratio tends to 1 and the log is taken as log1p of the
    small remainder; elsewhere the difference of logs is exact enough and
    cannot overflow.
    """
    if theta > 0:
        r = np.exp(-theta * t) / np.expm1(-theta)
    else:
        r = np.exp(theta * (1.0 - t)) / -np.expm1(theta)
    x = -r * np.expm1(-theta * (1.0 - t))
    near_one = x > -0.5
    direct = _log_abs_expm1(np.array(-theta)) - _log_abs_expm1(-theta * t)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(near_one, -np.log1p(np.where(near_one, x, 0.0)), direct)


def _phi(family: CopulaFamily, theta: float, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if family is CopulaFamily.CLAYTON:
        return np.expm1(-theta * np.log(t)) / theta
    if family is CopulaFamily.GUMBEL:
        return (-np.log(t)) ** theta
    if family is CopulaFamily.FRANK:
        return _frank_phi(theta, t)
    if family is CopulaFamily.A1:
        lt = np.log(t) / theta
        # x + 1/x - 2 == (x - 1)**2 / x, evaluated in log space
        with np.errstate(divide="ignore"):
            return np.exp(theta * (2.0 * np.log(-np.expm1(lt)) - lt))
    if family is CopulaFamily.A2:
        return ((1.0 - t) ** 2 / t) ** theta
    raise DomainError(f"unhandled family {family!r}")


def _quadratic_root(y: np.ndarray) -> np.ndarray:
    """Smaller root x of x + 1/x = y + 2, i.e. x = ((y+2) - sqrt(y(y+4))) / 2.

    Written as 2 / ((y+2) + sqrt(y(y+4))) to avoid cancellation for large y.
    """
    return 2.0 / (y + 2.0 + np.sqrt(y * (y + 4.0)))


def _phi_inv(family: CopulaFamily, theta: float, s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if family is CopulaFamily.CLAYTON:
        return np.exp(-np.log1p(theta * s) / theta)
    if family is CopulaFamily.GUMBEL:
        return np.exp(-(s ** (1.0 / theta)))
    if family is CopulaFamily.FRANK:
        # 1 + expm1(-theta) e^-s == e^-s (expm1(s) + e^-theta): no cancellation as s -> 0
        with np.errstate(divide="ignore"):
            return (s - np.logaddexp(_log_abs_expm1(s), -theta)) / theta
    if family is CopulaFamily.A1:
        return _quadratic_root(s ** (1.0 / theta)) ** theta
    if family is CopulaFamily.A2:
        return _quadratic_root(s ** (1.0 / theta))
    raise DomainError(f"unhandled family {family!r}")


def _ratio(family: CopulaFamily, theta: float, t: np.ndarray) -> np.ndarray:
    """phi(t) / phi'(t) in closed form."""
    t = np.asarray(t, dtype=float)
    if family is CopulaFamily.CLAYTON:
        return t * np.expm1(theta * np.log(t)) / theta
    if family is CopulaFamily.GUMBEL:
        return t * np.log(t) / theta
    if family is CopulaFamily.FRANK:
        return -_phi(family, theta, t) * np.expm1(theta * t) / theta
    if family is CopulaFamily.A1:
        em = np.expm1(np.log(t) / theta)
        return t * em / (2.0 + em)
    if family is CopulaFamily.A2:
        return t * (t - 1.0) / (theta * (t + 1.0))
    raise DomainError(f"unhandled family {family!r}")


def _K(family: CopulaFamily, theta: float, t: np.ndarray) -> np.ndarray:
    return np.asarray(t, dtype=float) - _ratio(family, theta, t)


def _check_open_unit(t, name: str = "t") -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError(f"{name} must lie in (0, 1)")
    return arr


def _scalarize(x: np.ndarray):
    return float(x) if np.ndim(x) == 0 else x


def generator(family, theta: float, t):
    """Archimedean generator phi(t; theta) for t in (0, 1]."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    arr = np.asarray(t, dtype=float)
    if np.any(~((arr > 0.0) & (arr <= 1.0))):
        raise DomainError("t must lie in (0, 1]")
    out = np.where(arr == 1.0, 0.0, _phi(fam, theta, np.where(arr == 1.0, 0.5, arr)))
    return _scalarize(out)


def inv_generator(family, theta: float, s):
    """Inverse generator; maps s >= 0 back into (0, 1]."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr >= 0.0)):
        raise DomainError("s must be non-negative")
    return _scalarize(_phi_inv(fam, theta, arr))


def gen_ratio(family, theta: float, t):
    """phi(t) / phi'(t) on (0, 1); non-positive everywhere."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    return _scalarize(_ratio(fam, theta, _check_open_unit(t)))


def kendall_K(family, theta: float, t):
    """Kendall distribution function K(t) = t - phi(t)/phi'(t)."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    return _scalarize(_K(fam, theta, _check_open_unit(t)))


def _inv_K(family: CopulaFamily, theta: float, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    lo = np.full(p.shape, EPS)
    hi = np.full(p.shape, 1.0 - EPS)
    k_lo = _K(family, theta, lo)
    k_hi = _K(family, theta, hi)
    if not (np.all(np.isfinite(k_lo)) and np.all(np.isfinite(k_hi))) or np.any(k_lo > k_hi):
        raise ConvergenceError(f"K is not a valid distribution function for {family.value}, theta={theta}")
    below = p <= k_lo
    above = p >= k_hi
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not np.any(active):
            break
        k_mid = _K(family, theta, mid)
        if np.any(np.isnan(k_mid)):
            raise ConvergenceError(f"K returned NaN inside the bracket for {family.value}, theta={theta}")
        go_right = k_mid <= p
        lo = np.where(active & go_right, mid, lo)
        hi = np.where(active & ~go_right, mid, hi)
    else:
        raise ConvergenceError("bisection for K inverse did not converge")
    w = 0.5 * (lo + hi)
    w = np.where(below, EPS, w)
    return np.where(above, 1.0 - EPS, w)


def inv_K(family, theta: float, p):
    """Generalised inverse of K by bisection on [1e-12, 1 - 1e-12]."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    return _scalarize(_inv_K(fam, theta, _check_open_unit(p, "p")))


def _pairs_from_uniforms(family: CopulaFamily, theta: float, s: np.ndarray, t: np.ndarray):
    w = _inv_K(family, theta, t)
    phi_w = _phi(family, theta, w)
    u = _phi_inv(family, theta, s * phi_w)
    v = _phi_inv(family, theta, (1.0 - s) * phi_w)
    return np.clip(u, EPS, 1.0 - EPS), np.clip(v, EPS, 1.0 - EPS)


def sample_pair(family, theta: float, rng: np.random.Generator) -> tuple[float, float]:
    """Draw one (u, v) pair by the conditional (s, t) algorithm."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    s, t = rng.random(2)
    u, v = _pairs_from_uniforms(fam, theta, np.array([s]), np.array([t]))
    return float(u[0]), float(v[0])


def sample_uv(family, theta: float, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised form of :func:`sample_pair` drawing ``n`` pairs from ``rng``."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    if n < 1:
        raise DomainError("n must be >= 1")
    st = rng.random((int(n), 2))
    return _pairs_from_uniforms(fam, theta, st[:, 0], st[:, 1])


@dataclass(frozen=True)
class SampleSet:
    u: np.ndarray
    v: np.ndarray
    family: CopulaFamily
    theta: float
    seed: int
    pairs: int = field(init=False)

    def __post_init__(self):
        if len(self.u) != len(self.v) or len(self.u) == 0:
            raise DomainError("a sample set needs a non-empty, equal number of u and v values")
        object.__setattr__(self, "pairs", len(self.u))

    def __len__(self) -> int:
        return self.pairs

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            self.family is other.family
            and self.theta == other.theta
            and self.seed == other.seed
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
        )

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write("u,v\n")
            for a, b in zip(self.u.tolist(), self.v.tolist()):
                fh.write(f"{a:.17g},{b:.17g}\n")


def sample_n(family, theta: float, n: int, seed: int) -> SampleSet:
    """Deterministic batch of ``n`` pairs for a given seed."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    u, v = sample_uv(fam, theta, n, random_source(seed))
    return SampleSet(u, v, fam, theta, int(seed))


def read_sample_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["u", "v"]:
            raise DomainError(f"expected header 'u,v', found {','.join(header)!r}")
        rows = [(float(a), float(b)) for a, b in reader]
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


def copula_cdf_points(family, theta: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """W = C(u, v) = phi^-1(phi(u) + phi(v)); used to check the law of W against K."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    return _phi_inv(fam, theta, _phi(fam, theta, u) + _phi(fam, theta, v))


__all__ = [
    "EPS",
    "SampleSet",
    "copula_cdf_points",
    "gen_ratio",
    "generator",
    "inv_K",
    "inv_generator",
    "kendall_K",
    "read_sample_csv",
    "sample_n",
    "sample_pair",
    "sample_uv",
]
