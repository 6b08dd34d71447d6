"""
Finite-difference Jacobians
"""
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

EPS = np.finfo(float).eps


class DifferenceScheme(str, Enum):
    SINGLE_SIDED = "single_sided"
    CENTRAL = "central"
    FIVE_POINT = "five_point"


def _step(x: float, scheme: DifferenceScheme, step: Optional[float]) -> float:
    scale = max(1.0, abs(x))
    if step is not None:
        return step * scale
    if scheme == DifferenceScheme.SINGLE_SIDED:
        return np.sqrt(EPS) * scale
    if scheme == DifferenceScheme.CENTRAL:
        return np.cbrt(EPS) * scale
    return EPS ** 0.2 * scale


def num_diff_jacobian(
    f: Callable[[np.ndarray], Sequence[float]],
    x: Sequence[float],
    scheme: DifferenceScheme = DifferenceScheme.SINGLE_SIDED,
    step: Optional[float] = None,
    f0: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Finite-difference Jacobian of f at x

    Args:
        f: Vector function of a float array
        x: Evaluation point
        scheme: single_sided (h = √ε·max(1,|x_j|)), central (∛ε) or five_point (ε^(1/5))
        step: Relative step overriding the scheme default
        f0: f(x), when the caller already has it (single-sided only)

    Returns:
        m×n Jacobian
    """
    scheme = DifferenceScheme(scheme)
    x = np.asarray(x, dtype=float).ravel()
    if f0 is None:
        f0 = np.asarray(f(x.copy()), dtype=float).ravel()
    jac = np.zeros((f0.size, x.size))

    def at(j: int, h: float) -> np.ndarray:
        probe = x.copy()
        probe[j] += h
        return np.asarray(f(probe), dtype=float).ravel()

    for j in range(x.size):
        h = _step(x[j], scheme, step)
        # exactly representable step
        h = (x[j] + h) - x[j]
        if scheme == DifferenceScheme.SINGLE_SIDED:
            jac[:, j] = (at(j, h) - f0) / h
        elif scheme == DifferenceScheme.CENTRAL:
            jac[:, j] = (at(j, h) - at(j, -h)) / (2.0 * h)
        else:
            jac[:, j] = (-at(j, 2.0 * h) + 8.0 * at(j, h) - 8.0 * at(j, -h) + at(j, -2.0 * h)) / (12.0 * h)
    return jac


__all__ = ["DifferenceScheme", "num_diff_jacobian"]
