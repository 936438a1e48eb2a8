"""Copula family enumeration, parameter domains and seeded random streams."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ignis.errors import DomainError


class CopulaFamily(enum.Enum):
    """The five Archimedean families, in one-hot order."""

    CLAYTON = "clayton"
    GUMBEL = "gumbel"
    FRANK = "frank"
    A1 = "a1"
    A2 = "a2"

    @property
    def index(self) -> int:
        return _ORDER.index(self)

    @classmethod
    def parse(cls, name: str | CopulaFamily) -> CopulaFamily:
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            valid = ", ".join(f.value for f in cls)
            raise DomainError(f"unknown copula family {name!r}; expected one of {valid}") from None

    def __str__(self) -> str:
        return self.value


_ORDER = list(CopulaFamily)
FAMILIES: tuple[CopulaFamily, ...] = tuple(_ORDER)


@dataclass(frozen=True)
class ThetaDomain:
    """Admissible parameter set of a family plus its training range.

    ``lower``/``upper`` bound the mathematical domain; ``lower_closed`` says
    whether ``lower`` itself is admissible.  ``excluded`` is an open interval
    removed from the domain (Frank excludes a neighbourhood of zero in
    training, and zero itself mathematically).
    """

    family: CopulaFamily
    lower: float
    upper: float
    lower_closed: bool
    train_lower: float
    train_upper: float
    excluded: tuple[float, float] | None = None
    train_excluded: tuple[float, float] | None = None

    def contains(self, theta: float) -> bool:
        if not math.isfinite(theta):
            return False
        if theta < self.lower or (theta == self.lower and not self.lower_closed):
            return False
        if theta > self.upper:
            return False
        if self.excluded is not None and self.excluded[0] <= theta <= self.excluded[1]:
            return False
        return True

    def in_training_range(self, theta: float) -> bool:
        if not self.train_lower <= theta <= self.train_upper:
            return False
        if self.train_excluded is not None:
            lo, hi = self.train_excluded
            if lo < theta < hi:
                return False
        return True

    def describe(self) -> str:
        if self.family is CopulaFamily.CLAYTON:
            return "θ > 0 required"
        if self.family is CopulaFamily.FRANK:
            return "θ ≠ 0 required"
        return "θ ≥ 1 required"

    def check(self, theta: float) -> float:
        theta = float(theta)
        if not self.contains(theta):
            raise DomainError(f"{self.family.value}: theta={theta!r} outside domain; {self.describe()}")
        return theta


_DOMAINS = {
    CopulaFamily.CLAYTON: ThetaDomain(CopulaFamily.CLAYTON, 0.0, math.inf, False, 0.1, 20.0),
    CopulaFamily.GUMBEL: ThetaDomain(CopulaFamily.GUMBEL, 1.0, math.inf, True, 1.0, 20.0),
    CopulaFamily.FRANK: ThetaDomain(
        CopulaFamily.FRANK, -math.inf, math.inf, False, -20.0, 20.0,
        excluded=(0.0, 0.0), train_excluded=(-0.1, 0.1),
    ),
    CopulaFamily.A1: ThetaDomain(CopulaFamily.A1, 1.0, math.inf, True, 1.0, 20.0),
    CopulaFamily.A2: ThetaDomain(CopulaFamily.A2, 1.0, math.inf, True, 1.0, 20.0),
}


def theta_domain(family: CopulaFamily | str) -> ThetaDomain:
    return _DOMAINS[CopulaFamily.parse(family)]


def random_source(seed: int, *key: int) -> np.random.Generator:
    """Seeded 64-bit PCG stream; ``key`` selects an independent child stream.

    Streams for distinct keys are statistically independent and do not depend
    on the order in which they are requested.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 128) - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
