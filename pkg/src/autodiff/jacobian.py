"""
Jacobian and Hessian drivers over the dual-number and tape backends
"""
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from src.autodiff.dual import DualNumber
from src.autodiff.scalar import REAL_TYPES, primal_value
from src.autodiff.tape import Op, Tape
from src.utils.errors import DimensionError


def _as_outputs(result) -> list:
    if isinstance(result, (list, tuple)):
        return list(result)
    if isinstance(result, np.ndarray):
        return result.ravel().tolist()
    return [result]


def forward_jacobian(
    f: Callable[[List[DualNumber]], object],
    x: Sequence[float],
    seeds: Optional[np.ndarray] = None,
    chunk_size: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Forward-mode Jacobian with all seed directions batched into the tangents

    Args:
        f: Function of a list of scalars returning a scalar or sequence
        x: Evaluation point (n)
        seeds: Optional k×n matrix of seed directions; identity by default
        chunk_size: Directions per sweep; 0/None uses DUAL_CHUNK_SIZE (0 = all)

    Returns:
        (f(x) as an m-vector, J as m×k, with k = n for identity seeds)
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    seeds = np.eye(n) if seeds is None else np.asarray(seeds, dtype=float)
    if seeds.ndim != 2 or seeds.shape[1] != n:
        raise DimensionError(f"Seed matrix must be k×{n}, got shape {seeds.shape}")

    k = seeds.shape[0]
    chunk = chunk_size or settings.DUAL_CHUNK_SIZE or max(k, 1)
    primal = x.tolist()

    y = None
    blocks = []
    for start in range(0, max(k, 1), chunk):
        directions = seeds[start:start + chunk]
        inputs = [DualNumber(primal[j], directions[:, j].copy()) for j in range(n)]
        outputs = _as_outputs(f(inputs))
        width = directions.shape[0]
        block = np.zeros((len(outputs), width))
        for i, out in enumerate(outputs):
            if isinstance(out, DualNumber):
                block[i] = out.tangents
        blocks.append(block)
        if y is None:
            y = np.array([primal_value(out) for out in outputs], dtype=float)

    return y, np.hstack(blocks) if blocks else np.zeros((y.size, 0))


def reverse_jacobian(
    tape: Tape,
    x: Sequence[float],
    workspace: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Reverse-mode Jacobian by one vectorized adjoint sweep over the tape

    All m output adjoints travel together as rows of an N×m array, so a
    single backward pass yields the full Jacobian.

    Args:
        tape: Recorded tape
        x: Evaluation point (n)
        workspace: Optional caller-owned float array of shape (len(tape), m)

    Returns:
        (y as an m-vector, J as m×n)
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != tape.n_inputs:
        raise DimensionError(f"Tape expects {tape.n_inputs} inputs, got {x.size}")

    vals = tape.replay_all(x.tolist())
    n_nodes = len(tape)
    m = tape.n_outputs

    if workspace is None:
        adjoint = np.zeros((n_nodes, m))
    else:
        if workspace.shape != (n_nodes, m):
            raise DimensionError(f"Workspace must have shape {(n_nodes, m)}, got {workspace.shape}")
        adjoint = workspace
        adjoint.fill(0.0)

    for row, node in enumerate(tape.output_indices):
        adjoint[node, row] += 1.0

    ops = tape.ops
    arg1 = tape.arg1
    arg2 = tape.arg2
    for i in range(n_nodes - 1, -1, -1):
        op = ops[i]
        if op <= Op.CONST:
            continue
        w = adjoint[i]
        if not w.any():
            continue
        a = arg1[i]
        if op == Op.ADD:
            adjoint[a] += w
            adjoint[arg2[i]] += w
        elif op == Op.SUB:
            adjoint[a] += w
            adjoint[arg2[i]] -= w
        elif op == Op.MUL:
            b = arg2[i]
            adjoint[a] += w * vals[b]
            adjoint[b] += w * vals[a]
        elif op == Op.DIV:
            b = arg2[i]
            adjoint[a] += w / vals[b]
            adjoint[b] -= w * (vals[i] / vals[b])
        elif op == Op.NEG:
            adjoint[a] -= w
        elif op == Op.SIN:
            adjoint[a] += w * np.cos(vals[a])
        elif op == Op.COS:
            adjoint[a] -= w * np.sin(vals[a])
        elif op == Op.TAN:
            adjoint[a] += w * (1.0 + vals[i] * vals[i])
        elif op == Op.EXP:
            adjoint[a] += w * vals[i]
        elif op == Op.LOG:
            adjoint[a] += w / vals[a]
        elif op == Op.SQRT:
            adjoint[a] += w / (2.0 * vals[i])
        elif op == Op.ABS:
            adjoint[a] += w * (1.0 if vals[a] >= 0.0 else -1.0)

    y = np.array([vals[i] for i in tape.output_indices], dtype=float)
    jac = adjoint[tape.input_nodes].T.copy() if tape.input_nodes else np.zeros((m, 0))
    return y, jac


def tape_forward_jacobian(tape: Tape, x: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Forward-mode Jacobian by replaying a tape on dual numbers"""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != tape.n_inputs:
        raise DimensionError(f"Tape expects {tape.n_inputs} inputs, got {x.size}")
    return forward_jacobian(tape.replay, x)


def hessian(f: Callable[[list], object], x: Sequence[float]) -> np.ndarray:
    """
    Hessian of a scalar function by forward-over-forward dual numbers

    The inner level carries d/dx, the outer level carries a second d/dx, so
    the outer tangents of the result hold the gradient as inner duals whose
    tangents are the Hessian rows.

    Args:
        f: Scalar-valued function of a list of scalars
        x: Evaluation point (n)

    Returns:
        n×n Hessian
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    eye = np.eye(n)

    inputs = []
    for i, value in enumerate(x.tolist()):
        inner = DualNumber(value, eye[i].copy())
        outer_tangents = np.empty(n, dtype=object)
        for j in range(n):
            outer_tangents[j] = DualNumber(eye[i, j], np.zeros(n))
        inputs.append(DualNumber(inner, outer_tangents))

    result = f(inputs)
    outputs = _as_outputs(result)
    if len(outputs) != 1:
        raise DimensionError(f"hessian needs a scalar function, got {len(outputs)} outputs")

    out = outputs[0]
    hess = np.zeros((n, n))
    if not isinstance(out, DualNumber):
        return hess
    for j, entry in enumerate(out.tangents):
        if isinstance(entry, DualNumber):
            hess[j] = entry.tangents
    return hess


__all__ = ["forward_jacobian", "reverse_jacobian", "tape_forward_jacobian", "hessian"]
