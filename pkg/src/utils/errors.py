"""
Exception hierarchy shared by every rbdad package
"""
from typing import Optional


class RbdadError(Exception):
    """Base class for all library errors"""


class ParseError(RbdadError):
    """Malformed model file syntax"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(RbdadError):
    """Model or configuration violates a structural invariant"""


class DimensionError(RbdadError, ValueError):
    """Vector or matrix has the wrong size for the model or tape"""


class RecordError(RbdadError):
    """The function being recorded raised or produced foreign values"""


class NumericalError(RbdadError):
    """Factorization pivot below tolerance"""


class UnknownEndEffector(RbdadError, LookupError):
    """End-effector name or index not registered in the model"""


class NotFloatingBase(RbdadError):
    """Operation requires a floating-base model"""


class SingularOrientation(RbdadError):
    """Euler-angle pitch too close to the gimbal singularity"""


class DivergedRollout(RbdadError):
    """Forward rollout left the admissible state region"""


class RiccatiFailure(RbdadError):
    """Quadratic model stayed indefinite after regularization"""


__all__ = [
    "RbdadError",
    "ParseError",
    "ValidationError",
    "DimensionError",
    "RecordError",
    "NumericalError",
    "UnknownEndEffector",
    "NotFloatingBase",
    "SingularOrientation",
    "DivergedRollout",
    "RiccatiFailure",
]
