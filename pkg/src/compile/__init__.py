"""Tape compilation: optimization passes, straight-line programs, derivative programs, source emission"""
from src.compile.derivatives import DerivativeFunction, JacobianMode, compile_jacobian, jacobian_tape
from src.compile.emit import emit_source, write_source
from src.compile.passes import (
    ExpressionBuilder,
    OptimizationConfig,
    eliminate_common_subexpressions,
    eliminate_dead_code,
    fold_constants,
    optimize,
    simplify,
)
from src.compile.program import SlpInstruction, StraightLineProgram, allocate_registers, compile_function
from src.compile.pycodegen import python_source

__all__ = [
    "DerivativeFunction",
    "JacobianMode",
    "compile_jacobian",
    "jacobian_tape",
    "emit_source",
    "write_source",
    "ExpressionBuilder",
    "OptimizationConfig",
    "eliminate_common_subexpressions",
    "eliminate_dead_code",
    "fold_constants",
    "optimize",
    "simplify",
    "SlpInstruction",
    "StraightLineProgram",
    "allocate_registers",
    "compile_function",
    "python_source",
]
