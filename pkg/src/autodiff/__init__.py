"""
Numeric backends: plain floats, forward-mode dual numbers and a recording tape
"""
from src.autodiff.dual import DualNumber
from src.autodiff.jacobian import forward_jacobian, hessian, reverse_jacobian, tape_forward_jacobian
from src.autodiff.scalar import primal_value, primal_values
from src.autodiff.serialization import load_tape, save_tape
from src.autodiff.tape import Op, Tape, TapeVariable, record

__all__ = [
    "DualNumber",
    "Tape",
    "TapeVariable",
    "Op",
    "record",
    "forward_jacobian",
    "reverse_jacobian",
    "tape_forward_jacobian",
    "hessian",
    "primal_value",
    "primal_values",
    "save_tape",
    "load_tape",
]
