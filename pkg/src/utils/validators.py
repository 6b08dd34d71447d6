"""
Input validation utilities
"""
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from src.utils.errors import DimensionError, ValidationError


class ArrayValidator:
    """Validates vector and matrix arguments at the API boundary"""

    @classmethod
    def check_length(cls, values: Sequence, expected: int, name: str) -> Sequence:
        """
        Check that a generic sequence has the expected length

        Works for lists of floats, dual numbers or tape variables alike.

        Args:
            values: Sequence to check
            expected: Required length
            name: Argument name used in the error message

        Returns:
            The unchanged sequence
        """
        try:
            size = len(values)
        except TypeError as exc:
            raise DimensionError(f"{name} must be a sequence, got {type(values).__name__}") from exc

        if size != expected:
            raise DimensionError(f"{name} has length {size}, expected {expected}")
        return values

    @classmethod
    def as_vector(cls, values, size: Optional[int] = None, name: str = "vector") -> np.ndarray:
        """
        Convert to a flat float64 array and check its size and finiteness

        Args:
            values: Array-like of real numbers
            size: Required size, or None to accept any
            name: Argument name used in the error message

        Returns:
            1-D float array (a copy)
        """
        arr = np.array(values, dtype=float).ravel()
        if size is not None and arr.size != size:
            raise DimensionError(f"{name} has size {arr.size}, expected {size}")
        if not np.all(np.isfinite(arr)):
            raise DimensionError(f"{name} contains non-finite entries")
        return arr

    @classmethod
    def as_matrix(cls, values, shape: tuple, name: str = "matrix") -> np.ndarray:
        """
        Convert to a 2-D float64 array of the given shape

        Args:
            values: Array-like
            shape: Required (rows, cols)
            name: Argument name used in the error message

        Returns:
            2-D float array
        """
        arr = np.asarray(values, dtype=float)
        if arr.shape != tuple(shape):
            raise DimensionError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
        return arr

    @classmethod
    def is_symmetric(cls, matrix: np.ndarray, tol: float = 1e-12) -> bool:
        """Check symmetry within an absolute tolerance"""
        matrix = np.asarray(matrix, dtype=float)
        return matrix.shape[0] == matrix.shape[1] and bool(np.allclose(matrix, matrix.T, rtol=0.0, atol=tol))

    @classmethod
    def is_positive_semidefinite(cls, matrix: np.ndarray, tol: float = 0.0) -> bool:
        """Check that the smallest eigenvalue of a symmetric matrix is >= -tol"""
        if not cls.is_symmetric(matrix, 1e-9):
            return False
        return bool(np.linalg.eigvalsh(matrix).min() >= -tol)


class FileValidator:
    """Validates model and problem files"""

    MODEL_EXTENSIONS = {".rbd", ".txt"}
    PROBLEM_EXTENSIONS = {".json"}

    @classmethod
    def validate_file_path(cls, file_path: Union[str, Path], extensions: Optional[Iterable[str]] = None) -> Path:
        """
        Validate that a file exists and has an allowed extension

        Args:
            file_path: Path to validate
            extensions: Allowed lowercase suffixes, or None for any

        Returns:
            Resolved path
        """
        path = Path(file_path)

        if not path.exists():
            raise ValidationError(f"File not found: {path}")

        if not path.is_file():
            raise ValidationError(f"Not a file: {path}")

        if extensions is not None and path.suffix.lower() not in set(extensions):
            raise ValidationError(f"Unsupported file type '{path.suffix}' for {path.name}")

        return path.resolve()

    @classmethod
    def validate_model_file(cls, file_path: Union[str, Path]) -> Path:
        """Validate a robot model file path"""
        return cls.validate_file_path(file_path, cls.MODEL_EXTENSIONS)

    @classmethod
    def validate_problem_file(cls, file_path: Union[str, Path]) -> Path:
        """Validate an SLQ problem file path"""
        return cls.validate_file_path(file_path, cls.PROBLEM_EXTENSIONS)


__all__ = ["ArrayValidator", "FileValidator"]
