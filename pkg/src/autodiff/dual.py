"""
Forward-mode dual numbers with a vector of tangents.

A ``DualNumber`` carries one primal value and ``k`` tangent directions in a
numpy array, so all seed directions of a Jacobian propagate in a single
sweep. Nesting (a dual whose primal and tangents are duals) gives second
derivatives.
"""
from typing import Any

import numpy as np

from src.autodiff import scalar
from src.autodiff.scalar import REAL_TYPES, primal_value


class DualNumber:
    """Primal value plus a vector of directional derivatives"""

    __slots__ = ("primal", "tangents")

    def __init__(self, primal: Any, tangents: np.ndarray):
        self.primal = primal
        self.tangents = tangents

    @classmethod
    def constant(cls, value: Any, width: int) -> "DualNumber":
        """A value with zero derivative in ``width`` directions"""
        return cls(value, np.zeros(width))

    @property
    def value(self):
        return self.primal

    @property
    def width(self) -> int:
        return self.tangents.shape[0]

    # Arithmetic
    def __add__(self, other):
        if isinstance(other, DualNumber):
            return DualNumber(self.primal + other.primal, self.tangents + other.tangents)
        return DualNumber(self.primal + other, self.tangents)

    def __radd__(self, other):
        return DualNumber(other + self.primal, self.tangents)

    def __sub__(self, other):
        if isinstance(other, DualNumber):
            return DualNumber(self.primal - other.primal, self.tangents - other.tangents)
        return DualNumber(self.primal - other, self.tangents)

    def __rsub__(self, other):
        return DualNumber(other - self.primal, -self.tangents)

    def __mul__(self, other):
        if isinstance(other, DualNumber):
            return DualNumber(
                self.primal * other.primal,
                self.tangents * other.primal + other.tangents * self.primal,
            )
        return DualNumber(self.primal * other, self.tangents * other)

    def __rmul__(self, other):
        return DualNumber(other * self.primal, self.tangents * other)

    def __truediv__(self, other):
        if isinstance(other, DualNumber):
            quotient = self.primal / other.primal
            return DualNumber(quotient, (self.tangents - other.tangents * quotient) / other.primal)
        return DualNumber(self.primal / other, self.tangents / other)

    def __rtruediv__(self, other):
        quotient = other / self.primal
        return DualNumber(quotient, -(self.tangents * quotient) / self.primal)

    def __neg__(self):
        return DualNumber(-self.primal, -self.tangents)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        if isinstance(exponent, int) and exponent >= 0:
            result = 1.0
            for _ in range(exponent):
                result = self * result
            return result
        if isinstance(exponent, REAL_TYPES):
            powered = self.primal ** exponent
            return DualNumber(powered, self.tangents * (exponent * self.primal ** (exponent - 1)))
        return (exponent * self.log()).exp()

    def __abs__(self):
        return self.fabs()

    # Elementary functions
    def sin(self):
        return DualNumber(scalar.sin(self.primal), self.tangents * scalar.cos(self.primal))

    def cos(self):
        return DualNumber(scalar.cos(self.primal), -(self.tangents * scalar.sin(self.primal)))

    def tan(self):
        t = scalar.tan(self.primal)
        return DualNumber(t, self.tangents * (1.0 + t * t))

    def exp(self):
        e = scalar.exp(self.primal)
        return DualNumber(e, self.tangents * e)

    def log(self):
        return DualNumber(scalar.log(self.primal), self.tangents / self.primal)

    def sqrt(self):
        root = scalar.sqrt(self.primal)
        return DualNumber(root, self.tangents / (2.0 * root))

    def fabs(self):
        if primal_value(self.primal) < 0.0:
            return -self
        return self

    # Comparisons see the primal value only
    def __lt__(self, other):
        return primal_value(self) < primal_value(other)

    def __le__(self, other):
        return primal_value(self) <= primal_value(other)

    def __gt__(self, other):
        return primal_value(self) > primal_value(other)

    def __ge__(self, other):
        return primal_value(self) >= primal_value(other)

    def __eq__(self, other):
        return primal_value(self) == primal_value(other)

    def __ne__(self, other):
        return primal_value(self) != primal_value(other)

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"DualNumber({self.primal!r}, {self.tangents!r})"


__all__ = ["DualNumber"]
