"""
3-vector and 3×3 matrix helpers over the scalar abstraction.

Vectors are 3-tuples, matrices are tuples of three row 3-tuples. Entries
may be floats, dual numbers or tape variables.
"""
from typing import Any, Tuple

Vec3 = Tuple[Any, Any, Any]
Mat3 = Tuple[Vec3, Vec3, Vec3]

ZERO3: Vec3 = (0.0, 0.0, 0.0)
IDENTITY3: Mat3 = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


def add3(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def sub3(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def neg3(a: Vec3) -> Vec3:
    return (-a[0], -a[1], -a[2])


def scale3(a: Vec3, s) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def dot3(a: Vec3, b: Vec3):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def cross3(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def skew(a: Vec3) -> Mat3:
    """Matrix of the cross product, skew(a) @ b == a × b"""
    return ((0.0, -a[2], a[1]), (a[2], 0.0, -a[0]), (-a[1], a[0], 0.0))


def mat_vec(m: Mat3, v: Vec3) -> Vec3:
    r0, r1, r2 = m
    return (
        r0[0] * v[0] + r0[1] * v[1] + r0[2] * v[2],
        r1[0] * v[0] + r1[1] * v[1] + r1[2] * v[2],
        r2[0] * v[0] + r2[1] * v[1] + r2[2] * v[2],
    )


def mat_t_vec(m: Mat3, v: Vec3) -> Vec3:
    """mᵀ v"""
    r0, r1, r2 = m
    return (
        r0[0] * v[0] + r1[0] * v[1] + r2[0] * v[2],
        r0[1] * v[0] + r1[1] * v[1] + r2[1] * v[2],
        r0[2] * v[0] + r1[2] * v[1] + r2[2] * v[2],
    )


def transpose3(m: Mat3) -> Mat3:
    return (
        (m[0][0], m[1][0], m[2][0]),
        (m[0][1], m[1][1], m[2][1]),
        (m[0][2], m[1][2], m[2][2]),
    )


def mat_mul(a: Mat3, b: Mat3) -> Mat3:
    bt = transpose3(b)
    return tuple(tuple(dot3(row, col) for col in bt) for row in a)


def mat_t_mul(a: Mat3, b: Mat3) -> Mat3:
    """aᵀ b"""
    return mat_mul(transpose3(a), b)


def mat_mul_t(a: Mat3, b: Mat3) -> Mat3:
    """a bᵀ"""
    return tuple(tuple(dot3(row, col) for col in b) for row in a)


def mat_add(a: Mat3, b: Mat3) -> Mat3:
    return tuple(add3(ra, rb) for ra, rb in zip(a, b))


def mat_sub(a: Mat3, b: Mat3) -> Mat3:
    return tuple(sub3(ra, rb) for ra, rb in zip(a, b))


def mat_scale(a: Mat3, s) -> Mat3:
    return tuple(scale3(row, s) for row in a)


def outer3(a: Vec3, b: Vec3) -> Mat3:
    return tuple((ai * b[0], ai * b[1], ai * b[2]) for ai in a)


__all__ = [
    "Vec3",
    "Mat3",
    "ZERO3",
    "IDENTITY3",
    "add3",
    "sub3",
    "neg3",
    "scale3",
    "dot3",
    "cross3",
    "skew",
    "mat_vec",
    "mat_t_vec",
    "transpose3",
    "mat_mul",
    "mat_t_mul",
    "mat_mul_t",
    "mat_add",
    "mat_sub",
    "mat_scale",
    "outer3",
]
