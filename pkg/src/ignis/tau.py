"""Kendall's tau of each family, its quadrature check, and moment inversion.

For an Archimedean generator phi, tau = 1 + 4 * integral_0^1 phi/phi' dt.
Closed forms used here::

    clayton  theta / (theta + 2)
    gumbel   1 - 1/theta
    frank    1 - (4/theta) * (1 - D1(theta)),     tau(-theta) = -tau(theta)
    a1       3 + 4 theta [psi(theta) - psi(theta + 1/2)]
    a2       1 - (6 - 8 ln 2) / theta

The A1 expression follows from substituting x = t**(1/theta) in the ratio
t (x - 1) / (x + 1) and summing the resulting alternating series; it is
checked against :func:`tau_quadrature` in the test suite.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from ignis.copula import _ratio
from ignis.errors import DegenerateDerivative, DomainError, TooFewObservations
from ignis.families import CopulaFamily, theta_domain
from ignis.features import _pair, pointwise_concordance
from ignis.quadrature import integrate
from ignis.special import LN2, debye1, digamma

GRID_STEP = 0.01
ROOT_TOL = 1e-8


def _tau_closed(family: CopulaFamily, theta: float) -> float:
    if family is CopulaFamily.CLAYTON:
        return theta / (theta + 2.0)
    if family is CopulaFamily.GUMBEL:
        return 1.0 - 1.0 / theta
    if family is CopulaFamily.FRANK:
        if theta < 0.0:
            return -_tau_closed(family, -theta)
        return 1.0 - 4.0 / theta * (1.0 - debye1(theta))
    if family is CopulaFamily.A1:
        return 3.0 + 4.0 * theta * (digamma(theta) - digamma(theta + 0.5))
    if family is CopulaFamily.A2:
        return 1.0 - (6.0 - 8.0 * LN2) / theta
    raise DomainError(f"unhandled family {family!r}")


def theoretical_tau(family, theta: float) -> float:
    """Closed-form Kendall's tau for ``family`` at ``theta``."""
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    return _tau_closed(fam, theta)


def tau_quadrature(family, theta: float, epsabs: float = 1e-10) -> float:
    """Kendall's tau as 1 + 4 * integral of phi/phi' over (0, 1).

    Independent of the closed forms: it only evaluates the generator ratio.
    Raises :class:`~ignis.errors.QuadratureError` on non-convergence.
    """
    fam = CopulaFamily.parse(family)
    theta = theta_domain(fam).check(theta)
    val, _ = integrate(lambda t: _ratio(fam, theta, t), 0.0, 1.0, epsabs=epsabs, epsrel=0.0)
    return 1.0 + 4.0 * val


def a1_boxed_forms(theta: float) -> tuple[float, float]:
    """The two alternative A1 expressions as commonly printed.

    ``1 + 2[psi(theta) - psi(theta + 1/2)]`` and
    ``3 + 4 theta [psi(theta + 1/2) - psi(theta)]``.  Neither equals the
    integral; kept for comparison output only.
    """
    d = digamma(theta) - digamma(theta + 0.5)
    return 1.0 + 2.0 * d, 3.0 - 4.0 * theta * d


def training_grid(family: CopulaFamily, step: float = GRID_STEP) -> list[np.ndarray]:
    """theta grids covering the family's training range, one per connected piece."""
    dom = theta_domain(family)
    if family is CopulaFamily.FRANK:
        lo, hi = dom.train_excluded
        pieces = [(dom.train_lower, lo), (hi, dom.train_upper)]
    else:
        pieces = [(dom.train_lower, dom.train_upper)]
    grids = []
    for a, b in pieces:
        k = int(round((b - a) / step))
        grids.append(np.linspace(a, b, k + 1))
    return grids


@functools.lru_cache(maxsize=None)
def _tau_curve(family: CopulaFamily, step: float) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    return tuple((g, np.array([_tau_closed(family, float(th)) for th in g])) for g in training_grid(family, step))


def _bisect(f, a: float, b: float, fa: float, tol: float = ROOT_TOL) -> float:
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def grid_roots(f, grid: np.ndarray, values: np.ndarray, tol: float = ROOT_TOL) -> list[float]:
    """All roots of ``f`` bracketed by sign changes of ``values`` on ``grid``."""
    roots: list[float] = []
    for i in range(len(grid)):
        if values[i] == 0.0:
            roots.append(float(grid[i]))
            continue
        if i + 1 < len(grid) and values[i + 1] != 0.0 and (values[i] < 0.0) != (values[i + 1] < 0.0):
            roots.append(_bisect(f, float(grid[i]), float(grid[i + 1]), float(values[i]), tol))
    return roots


@dataclass(frozen=True)
class MomResult:
    family: CopulaFamily
    tau_hat: float
    roots: tuple[float, ...]
    se: tuple[float | None, ...] = field(default=())

    @property
    def feasible(self) -> bool:
        return len(self.roots) > 0


def mom_estimate(family, tau_hat: float, step: float = GRID_STEP) -> MomResult:
    """Every theta in the training range whose tau equals ``tau_hat``.

    The curve is scanned on a ``step`` grid and each sign change of
    tau(theta) - tau_hat is refined by bisection.  An empty root list means
    ``tau_hat`` is unreachable for this family.
    """
    fam = CopulaFamily.parse(family)
    tau_hat = float(tau_hat)
    if not -1.0 <= tau_hat <= 1.0:
        raise DomainError(f"tau_hat={tau_hat} outside [-1, 1]")
    roots: list[float] = []
    for grid, curve in _tau_curve(fam, step):
        roots.extend(grid_roots(lambda th: _tau_closed(fam, th) - tau_hat, grid, curve - tau_hat))
    return MomResult(fam, tau_hat, tuple(roots))


def jackknife_tau_se(u, v) -> float:
    """Jackknife standard error of the sample Kendall's tau.

    Leave-one-out values come from the pointwise concordance sums, so the
    whole jackknife costs O(n log n).
    """
    u, v = _pair(u, v, minimum=3)
    n = u.size
    c = pointwise_concordance(u, v).astype(float)
    total = 0.5 * c.sum()
    pairs_minus = (n - 1) * (n - 2) / 2.0
    loo = (total - c) / pairs_minus
    return float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))


def tau_derivative(family, theta: float, rel_step: float = 1e-5) -> float:
    """d tau / d theta by central differences (forward at a closed lower bound)."""
    fam = CopulaFamily.parse(family)
    dom = theta_domain(fam)
    theta = dom.check(theta)
    h = rel_step * max(1.0, abs(theta))
    if dom.contains(theta - h):
        return (_tau_closed(fam, theta + h) - _tau_closed(fam, theta - h)) / (2.0 * h)
    return (-3.0 * _tau_closed(fam, theta) + 4.0 * _tau_closed(fam, theta + h) - _tau_closed(fam, theta + 2 * h)) / (2.0 * h)


def mom_se(family, u, v, theta_hat: float, min_slope: float = 1e-8) -> float:
    """Delta-method SE of a moment estimate: se(tau_hat) / |tau'(theta_hat)|.

    se(tau_hat) is the jackknife estimate.  Raises DegenerateDerivative where
    the tau curve is flat, since the SE is undefined there.
    """
    u, v = _pair(u, v)
    if u.size < 10:
        raise TooFewObservations(f"mom_se needs n >= 10, got {u.size}")
    slope = tau_derivative(family, theta_hat)
    if abs(slope) < min_slope:
        raise DegenerateDerivative(f"|dtau/dtheta| = {abs(slope):.3g} at theta={theta_hat}; SE undefined")
    return jackknife_tau_se(u, v) / abs(slope)
