"""
Scalar abstraction shared by the float, dual-number and tape backends.

Library code never calls ``math`` directly; it goes through the dispatch
functions below so the same algorithm runs on any backend. A backend type
provides the arithmetic dunders, primal-value comparisons and the methods
``sin cos tan exp log sqrt fabs``.
"""
import math
from typing import Any, Protocol, Sequence, Union, runtime_checkable

import numpy as np

REAL_TYPES = (float, int, np.floating, np.integer)


@runtime_checkable
class Scalar(Protocol):
    """Operations every numeric backend implements"""

    def __add__(self, other: Any) -> Any: ...

    def __sub__(self, other: Any) -> Any: ...

    def __mul__(self, other: Any) -> Any: ...

    def __truediv__(self, other: Any) -> Any: ...

    def __neg__(self) -> Any: ...

    def __lt__(self, other: Any) -> bool: ...

    def sin(self) -> Any: ...

    def cos(self) -> Any: ...

    def exp(self) -> Any: ...

    def log(self) -> Any: ...

    def sqrt(self) -> Any: ...


ScalarLike = Union[float, Scalar]


def is_real(x: Any) -> bool:
    """True for plain Python/numpy real numbers"""
    return isinstance(x, REAL_TYPES)


def sin(x):
    return math.sin(x) if isinstance(x, REAL_TYPES) else x.sin()


def cos(x):
    return math.cos(x) if isinstance(x, REAL_TYPES) else x.cos()


def tan(x):
    return math.tan(x) if isinstance(x, REAL_TYPES) else x.tan()


def exp(x):
    return math.exp(x) if isinstance(x, REAL_TYPES) else x.exp()


def log(x):
    return math.log(x) if isinstance(x, REAL_TYPES) else x.log()


def sqrt(x):
    return math.sqrt(x) if isinstance(x, REAL_TYPES) else x.sqrt()


def fabs(x):
    return math.fabs(x) if isinstance(x, REAL_TYPES) else x.fabs()


def sigmoid(x):
    """Logistic function 1/(1+exp(-x)), built from exp so every backend supports it"""
    return 1.0 / (1.0 + exp(-x))


def primal_value(x) -> float:
    """Innermost float value of a possibly nested AD scalar"""
    while not isinstance(x, REAL_TYPES):
        x = x.value
    return float(x)


def primal_values(xs: Sequence) -> np.ndarray:
    """Vectorized ``primal_value``"""
    return np.array([primal_value(x) for x in xs], dtype=float)


__all__ = [
    "Scalar",
    "ScalarLike",
    "REAL_TYPES",
    "is_real",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
    "fabs",
    "sigmoid",
    "primal_value",
    "primal_values",
]
