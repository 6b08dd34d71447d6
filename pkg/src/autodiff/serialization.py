"""
Binary tape files for caching recordings between runs.

Layout (little-endian):
    magic     5 bytes  b"RBDT1"
    header    uint32 n_inputs, uint32 n_instructions, uint32 n_outputs, uint32 flags
    records   n_instructions × {op: u1, a: i4, b: i4, const: f8}
    outputs   n_outputs × i4
"""
import struct
from pathlib import Path
from typing import Union

import numpy as np

from src.autodiff.tape import BINARY_OPS, UNARY_OPS, Op, Tape
from src.utils.errors import ValidationError
from src.utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = b"RBDT1"
HEADER = struct.Struct("<IIII")
RECORD_DTYPE = np.dtype([("op", "u1"), ("a", "<i4"), ("b", "<i4"), ("const", "<f8")])

FLAG_BRANCH_WARNING = 1


def tape_to_bytes(tape: Tape) -> bytes:
    records = np.zeros(len(tape), dtype=RECORD_DTYPE)
    records["op"] = tape.ops
    records["a"] = tape.arg1
    records["b"] = tape.arg2
    records["const"] = tape.consts
    flags = FLAG_BRANCH_WARNING if tape.branch_warning else 0
    header = HEADER.pack(tape.n_inputs, len(tape), tape.n_outputs, flags)
    outputs = np.asarray(tape.output_indices, dtype="<i4")
    return MAGIC + header + records.tobytes() + outputs.tobytes()


def _check_record(index: int, op: int, a: int, b: int, n_inputs: int):
    """Operands must name earlier entries; inputs must name a valid slot"""
    if op == Op.INPUT:
        if not 0 <= a < n_inputs:
            raise ValidationError(f"Entry {index}: input slot {a} outside 0..{n_inputs - 1}")
        return
    if op == Op.CONST:
        return
    if op not in BINARY_OPS and op not in UNARY_OPS:
        raise ValidationError(f"Entry {index}: unknown opcode {op}")
    operands = (a, b) if op in BINARY_OPS else (a,)
    for operand in operands:
        if not 0 <= operand < index:
            raise ValidationError(f"Entry {index}: operand {operand} does not precede it")


def tape_from_bytes(data: bytes) -> Tape:
    if data[: len(MAGIC)] != MAGIC:
        raise ValidationError("Not a tape file (bad magic)")

    offset = len(MAGIC)
    try:
        n_inputs, n_instructions, n_outputs, flags = HEADER.unpack_from(data, offset)
    except struct.error as exc:
        raise ValidationError("Truncated tape header") from exc
    offset += HEADER.size

    expected = offset + n_instructions * RECORD_DTYPE.itemsize + n_outputs * 4
    if len(data) != expected:
        raise ValidationError(f"Tape file has {len(data)} bytes, expected {expected}")

    records = np.frombuffer(data, dtype=RECORD_DTYPE, count=n_instructions, offset=offset)
    offset += n_instructions * RECORD_DTYPE.itemsize
    outputs = np.frombuffer(data, dtype="<i4", count=n_outputs, offset=offset)

    tape = Tape(n_inputs)
    for index, (op, a, b, const) in enumerate(zip(
        records["op"].tolist(), records["a"].tolist(), records["b"].tolist(), records["const"].tolist()
    )):
        _check_record(index, op, a, b, n_inputs)
        if op == Op.INPUT:
            tape.add_input(a)
        elif op == Op.CONST:
            tape.constant(const)
        else:
            tape.append(op, a, b, const)
    if any(not 0 <= i < n_instructions for i in outputs.tolist()):
        raise ValidationError("Tape output refers to a missing entry")
    tape.output_indices = outputs.tolist()
    tape.branch_warning = bool(flags & FLAG_BRANCH_WARNING)

    if len(tape) != n_instructions:
        raise ValidationError("Tape file contains duplicate constants")
    return tape


def save_tape(tape: Tape, path: Union[str, Path]) -> Path:
    """
    Write a tape to disk

    Args:
        tape: Tape to store
        path: Destination file

    Returns:
        The path written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(tape_to_bytes(tape))
    logger.debug(f"Saved tape with {len(tape)} instructions to {path}")
    return path


def load_tape(path: Union[str, Path]) -> Tape:
    """Read a tape written by ``save_tape``"""
    path = Path(path)
    tape = tape_from_bytes(path.read_bytes())
    logger.debug(f"Loaded tape with {len(tape)} instructions from {path}")
    return tape


__all__ = ["MAGIC", "HEADER", "RECORD_DTYPE", "save_tape", "load_tape", "tape_to_bytes", "tape_from_bytes"]
