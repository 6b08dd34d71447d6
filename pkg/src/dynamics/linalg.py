"""
Dense symmetric positive-definite solves over the scalar abstraction
"""
from typing import List, Optional, Sequence

from config.settings import settings
from src.autodiff import scalar
from src.autodiff.scalar import primal_value
from src.utils.errors import NumericalError


def cholesky(A: Sequence[Sequence], tolerance: Optional[float] = None) -> List[List]:
    """
    Lower-triangular L with A = L Lᵀ

    Args:
        A: Symmetric positive-definite matrix as nested sequences
        tolerance: Minimum admissible pivot (PIVOT_TOLERANCE by default)

    Returns:
        L as a list of rows
    """
    tol = settings.PIVOT_TOLERANCE if tolerance is None else tolerance
    n = len(A)
    L: List[List] = [[0.0] * n for _ in range(n)]
    for j in range(n):
        pivot = A[j][j]
        for k in range(j):
            pivot = pivot - L[j][k] * L[j][k]
        if not primal_value(pivot) > tol:
            raise NumericalError(f"Cholesky pivot {primal_value(pivot):.3e} at row {j} is below {tol:.1e}")
        diag = scalar.sqrt(pivot)
        L[j][j] = diag
        for i in range(j + 1, n):
            s = A[i][j]
            for k in range(j):
                s = s - L[i][k] * L[j][k]
            L[i][j] = s / diag
    return L


def cholesky_solve(L: Sequence[Sequence], b: Sequence) -> List:
    """Solve L Lᵀ x = b"""
    n = len(L)
    y: List = [None] * n
    for i in range(n):
        s = b[i]
        for k in range(i):
            s = s - L[i][k] * y[k]
        y[i] = s / L[i][i]
    x: List = [None] * n
    for i in range(n - 1, -1, -1):
        s = y[i]
        for k in range(i + 1, n):
            s = s - L[k][i] * x[k]
        x[i] = s / L[i][i]
    return x


def solve_spd(A: Sequence[Sequence], b: Sequence) -> List:
    return cholesky_solve(cholesky(A), b)


__all__ = ["cholesky", "cholesky_solve", "solve_spd"]
