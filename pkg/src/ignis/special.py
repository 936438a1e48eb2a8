"""Digamma and first-order Debye functions."""

from __future__ import annotations

import math

import numpy as np

from ignis.errors import DomainError
from ignis.quadrature import integrate

# B_{2k} / (2k) for k = 1..8 in the asymptotic expansion
# psi(x) ~ ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k}).
_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)
_SHIFT = 6.0


def digamma(x):
    """Digamma function for positive real arguments.

    Uses the recurrence psi(x) = psi(x + 1) - 1/x until the argument reaches 6,
    then the asymptotic series.  Accepts scalars or arrays.

    Raises
    ------
    DomainError
        If any argument is not strictly positive.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("digamma requires x > 0")
    z = arr.copy()
    acc = np.zeros_like(z)
    while True:
        small = z < _SHIFT
        if not np.any(small):
            break
        acc = acc - np.where(small, 1.0 / z, 0.0)
        z = np.where(small, z + 1.0, z)
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for c in reversed(_ASYMPTOTIC):
        series = series * inv2 + c
    out = acc + np.log(z) - 0.5 / z - series * inv2
    return float(out) if out.ndim == 0 else out


def _debye_integrand(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    nz = t != 0.0
    out[nz] = t[nz] / np.expm1(t[nz])
    return out


def debye1(x: float) -> float:
    """D1(x) = (1/x) * integral_0^x t / (e^t - 1) dt, with D1(0) = 1.

    Negative arguments use D1(-x) = D1(x) + x/2.
    """
    x = float(x)
    if x == 0.0:
        return 1.0
    if x < 0.0:
        return debye1(-x) - x / 2.0
    val, _ = integrate(_debye_integrand, 0.0, x, epsabs=1e-13, epsrel=1e-13)
    return val / x


EULER_GAMMA = 0.57721566490153286061
LN2 = math.log(2.0)
