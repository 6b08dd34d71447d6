"""
Tree-structured LᵀL factorization of the joint-space inertia matrix.

Working from the last DoF towards the root, each pivot only updates the
entries between its ancestors in the expanded DoF tree, so L has nonzeros
only at (DoF, ancestor DoF) pairs and M = LᵀL without fill-in. The DoF
ordering is the model's topological order; no permutation is needed.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import settings
from src.autodiff import scalar
from src.autodiff.scalar import primal_value
from src.dynamics.crba import JointSpaceInertia
from src.model.robot_model import RobotModel
from src.utils.errors import DimensionError, NumericalError


@dataclass(frozen=True)
class LtLFactorization:
    """Lower-triangular L (list of rows) and the DoF parent array defining its sparsity"""

    L: List[List]
    parents: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.parents)

    def as_array(self) -> np.ndarray:
        return np.array([[primal_value(x) for x in row] for row in self.L], dtype=float)


def ltl_factorize(
    M: Union[JointSpaceInertia, Sequence[Sequence]],
    model: Optional[RobotModel] = None,
    parents: Optional[Sequence[int]] = None,
    tolerance: Optional[float] = None,
) -> LtLFactorization:
    """
    Factorize M = LᵀL following the kinematic tree

    Args:
        M: Joint-space inertia (from crba on the same model) or nested sequences
        model: Model providing the DoF parent array
        parents: Explicit DoF parent array (-1 for roots), instead of a model
        tolerance: Minimum admissible pivot (PIVOT_TOLERANCE by default)

    Returns:
        LtLFactorization
    """
    matrix = M.matrix if isinstance(M, JointSpaceInertia) else M
    if parents is None:
        if model is None:
            raise ValueError("ltl_factorize needs a model or an explicit parent array")
        parents = model.dof_parents
    parents = tuple(int(p) for p in parents)
    n = len(parents)
    if len(matrix) != n:
        raise DimensionError(f"Matrix has {len(matrix)} rows, the tree has {n} DoFs")

    tol = settings.PIVOT_TOLERANCE if tolerance is None else tolerance
    H = [list(row) for row in matrix]
    for k in range(n - 1, -1, -1):
        pivot_value = primal_value(H[k][k])
        if not pivot_value > tol:
            raise NumericalError(f"LtL pivot {pivot_value:.3e} at DoF {k} is below {tol:.1e}")
        H[k][k] = scalar.sqrt(H[k][k])
        i = parents[k]
        while i != -1:
            H[k][i] = H[k][i] / H[k][k]
            i = parents[i]
        i = parents[k]
        while i != -1:
            j = i
            while j != -1:
                H[i][j] = H[i][j] - H[k][i] * H[k][j]
                j = parents[j]
            i = parents[i]

    # Keep only the lower-triangular ancestor pattern
    L: List[List] = [[0.0] * n for _ in range(n)]
    for k in range(n):
        L[k][k] = H[k][k]
        i = parents[k]
        while i != -1:
            L[k][i] = H[k][i]
            i = parents[i]
    return LtLFactorization(L, parents)


def ltl_solve(fac: LtLFactorization, b: Sequence) -> List:
    """
    Solve M x = b with M = LᵀL

    Args:
        fac: Factorization
        b: Right-hand side (nv)

    Returns:
        x = M⁻¹ b
    """
    if len(b) != fac.size:
        raise DimensionError(f"Right-hand side has length {len(b)}, expected {fac.size}")
    L, parents = fac.L, fac.parents
    x = b.ravel().tolist() if isinstance(b, np.ndarray) else list(b)
    # x ← L⁻ᵀ x
    for i in range(fac.size - 1, -1, -1):
        x[i] = x[i] / L[i][i]
        j = parents[i]
        while j != -1:
            x[j] = x[j] - L[i][j] * x[i]
            j = parents[j]
    # x ← L⁻¹ x
    for i in range(fac.size):
        j = parents[i]
        while j != -1:
            x[i] = x[i] - L[i][j] * x[j]
            j = parents[j]
        x[i] = x[i] / L[i][i]
    return x


def ltl_inverse(fac: LtLFactorization) -> List[List]:
    """M⁻¹ column by column"""
    n = fac.size
    columns = []
    for k in range(n):
        unit = [0.0] * n
        unit[k] = 1.0
        columns.append(ltl_solve(fac, unit))
    return [[columns[j][i] for j in range(n)] for i in range(n)]


__all__ = ["LtLFactorization", "ltl_factorize", "ltl_solve", "ltl_inverse"]
