"""Exception hierarchy shared by every ignis module."""

from __future__ import annotations


class IgnisError(Exception):
    """Base class for all library errors."""


class DomainError(IgnisError, ValueError):
    """A parameter or argument lies outside its admissible domain."""


class ConvergenceError(IgnisError, ArithmeticError):
    """An iterative solver failed to bracket or converge."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature exhausted its subdivision budget."""


class TooFewObservations(IgnisError, ValueError):
    pass


class LengthMismatch(IgnisError, ValueError):
    pass


class DegenerateInput(IgnisError, ValueError):
    """A statistic is undefined because a coordinate has zero spread."""


class DegenerateDerivative(IgnisError, ArithmeticError):
    """The slope of the tau curve is too flat for a delta-method SE."""


class DegenerateResample(DegenerateInput):
    pass


class ScalerUnset(IgnisError, RuntimeError):
    pass


class EmptyBatch(IgnisError, ValueError):
    pass


class FormatError(IgnisError, ValueError):
    """A model or data file does not follow its declared format."""


class MissingColumn(IgnisError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "missing column"


class EmptyAfterCleaning(IgnisError, ValueError):
    pass


class NonPositivePrice(IgnisError, ValueError):
    pass
