"""
Spatial (6-D) vector algebra, angular part first.

Transforms are stored as a rotation E and a translation r and act as

    motion:  ω' = E ω,          v' = E (v − r × ω)
    force:   n' = E (n − r × f), f' = E f

so ``SpatialTransform(E, r)`` maps coordinates of frame A into frame B,
where B sits at r (A coordinates) and E rotates A coordinates into B.
"""
from typing import Any, NamedTuple

from src.spatial.linalg3 import (
    IDENTITY3,
    ZERO3,
    Mat3,
    Vec3,
    add3,
    cross3,
    dot3,
    mat_add,
    mat_mul,
    mat_mul_t,
    mat_scale,
    mat_sub,
    mat_t_mul,
    mat_t_vec,
    mat_vec,
    neg3,
    outer3,
    scale3,
    skew,
    sub3,
    transpose3,
)


class MotionVector(NamedTuple):
    angular: Vec3
    linear: Vec3


class ForceVector(NamedTuple):
    torque: Vec3
    force: Vec3


class SpatialTransform(NamedTuple):
    rotation: Mat3
    translation: Vec3


class SpatialInertia(NamedTuple):
    """Rigid-body inertia; rotational_inertia is about the centre of mass, link-frame axes"""

    mass: Any
    com: Vec3
    rotational_inertia: Mat3


class SpatialMatrix(NamedTuple):
    """Symmetric 6×6 operator [[upper, coupling], [couplingᵀ, lower]] mapping motion to force"""

    upper: Mat3
    coupling: Mat3
    lower: Mat3


ZERO_MOTION = MotionVector(ZERO3, ZERO3)
ZERO_FORCE = ForceVector(ZERO3, ZERO3)
IDENTITY_TRANSFORM = SpatialTransform(IDENTITY3, ZERO3)


# Vector arithmetic

def motion_add(a: MotionVector, b: MotionVector) -> MotionVector:
    return MotionVector(add3(a.angular, b.angular), add3(a.linear, b.linear))


def motion_scale(a: MotionVector, s) -> MotionVector:
    return MotionVector(scale3(a.angular, s), scale3(a.linear, s))


def force_add(a: ForceVector, b: ForceVector) -> ForceVector:
    return ForceVector(add3(a.torque, b.torque), add3(a.force, b.force))


def force_sub(a: ForceVector, b: ForceVector) -> ForceVector:
    return ForceVector(sub3(a.torque, b.torque), sub3(a.force, b.force))


def force_scale(a: ForceVector, s) -> ForceVector:
    return ForceVector(scale3(a.torque, s), scale3(a.force, s))


def spatial_dot(m: MotionVector, f: ForceVector):
    """Power pairing ⟨m, f⟩"""
    return dot3(m.angular, f.torque) + dot3(m.linear, f.force)


def cross_motion(v: MotionVector, m: MotionVector) -> MotionVector:
    """v × m"""
    return MotionVector(
        cross3(v.angular, m.angular),
        add3(cross3(v.angular, m.linear), cross3(v.linear, m.angular)),
    )


def cross_force(v: MotionVector, f: ForceVector) -> ForceVector:
    """v ×* f"""
    return ForceVector(
        add3(cross3(v.angular, f.torque), cross3(v.linear, f.force)),
        cross3(v.angular, f.force),
    )


# Transforms

def transform_motion(X: SpatialTransform, m: MotionVector) -> MotionVector:
    E, r = X
    return MotionVector(mat_vec(E, m.angular), mat_vec(E, sub3(m.linear, cross3(r, m.angular))))


def transform_force(X: SpatialTransform, f: ForceVector) -> ForceVector:
    E, r = X
    return ForceVector(mat_vec(E, sub3(f.torque, cross3(r, f.force))), mat_vec(E, f.force))


def inverse_transform_motion(X: SpatialTransform, m: MotionVector) -> MotionVector:
    """X⁻¹ m, i.e. back from frame B to frame A"""
    E, r = X
    angular = mat_t_vec(E, m.angular)
    return MotionVector(angular, add3(mat_t_vec(E, m.linear), cross3(r, angular)))


def inverse_transform_force(X: SpatialTransform, f: ForceVector) -> ForceVector:
    """Xᵀ f, a force in B coordinates expressed in A"""
    E, r = X
    force = mat_t_vec(E, f.force)
    return ForceVector(add3(mat_t_vec(E, f.torque), cross3(r, force)), force)


def compose(X2: SpatialTransform, X1: SpatialTransform) -> SpatialTransform:
    """X2 ∘ X1: apply X1 first"""
    E1, r1 = X1
    E2, r2 = X2
    return SpatialTransform(mat_mul(E2, E1), add3(r1, mat_t_vec(E1, r2)))


def inverse(X: SpatialTransform) -> SpatialTransform:
    E, r = X
    return SpatialTransform(transpose3(E), neg3(mat_vec(E, r)))


# Inertia

def inertia_apply(I: SpatialInertia, m: MotionVector) -> ForceVector:
    """I·m with I about the centre of mass: n = I_c ω + m c × (v − c × ω), f = m (v − c × ω)"""
    mass, c, Ic = I
    w = m.angular
    vc = sub3(m.linear, cross3(c, w))
    force = scale3(vc, mass)
    return ForceVector(add3(mat_vec(Ic, w), cross3(c, force)), force)


def inertia_to_matrix(I: SpatialInertia) -> SpatialMatrix:
    """Block form of a rigid-body inertia expressed at the link origin"""
    mass, c, Ic = I
    cc = dot3(c, c)
    shift = mat_sub(((cc, 0.0, 0.0), (0.0, cc, 0.0), (0.0, 0.0, cc)), outer3(c, c))
    return SpatialMatrix(
        mat_add(Ic, mat_scale(shift, mass)),
        mat_scale(skew(c), mass),
        ((mass, 0.0, 0.0), (0.0, mass, 0.0), (0.0, 0.0, mass)),
    )


def matrix_apply(M: SpatialMatrix, m: MotionVector) -> ForceVector:
    A, B, C = M
    w, v = m
    return ForceVector(add3(mat_vec(A, w), mat_vec(B, v)), add3(mat_t_vec(B, w), mat_vec(C, v)))


def matrix_add(a: SpatialMatrix, b: SpatialMatrix) -> SpatialMatrix:
    return SpatialMatrix(mat_add(a.upper, b.upper), mat_add(a.coupling, b.coupling), mat_add(a.lower, b.lower))


def matrix_sub(a: SpatialMatrix, b: SpatialMatrix) -> SpatialMatrix:
    return SpatialMatrix(mat_sub(a.upper, b.upper), mat_sub(a.coupling, b.coupling), mat_sub(a.lower, b.lower))


def force_outer(u: ForceVector, scale) -> SpatialMatrix:
    """u uᵀ · scale"""
    n = scale3(u.torque, scale)
    f = scale3(u.force, scale)
    return SpatialMatrix(outer3(n, u.torque), outer3(n, u.force), outer3(f, u.force))


def matrix_to_parent(X: SpatialTransform, M: SpatialMatrix) -> SpatialMatrix:
    """Xᵀ M X, an inertia-like operator in B coordinates expressed in A"""
    E, r = X
    A = mat_t_mul(E, mat_mul(M.upper, E))
    B = mat_t_mul(E, mat_mul(M.coupling, E))
    C = mat_t_mul(E, mat_mul(M.lower, E))
    rx = skew(r)
    rx_c = mat_mul(rx, C)
    upper = mat_sub(mat_add(mat_sub(A, mat_mul(B, rx)), mat_mul_t(rx, B)), mat_mul(rx_c, rx))
    return SpatialMatrix(upper, mat_add(B, rx_c), C)


__all__ = [
    "MotionVector",
    "ForceVector",
    "SpatialTransform",
    "SpatialInertia",
    "SpatialMatrix",
    "ZERO_MOTION",
    "ZERO_FORCE",
    "IDENTITY_TRANSFORM",
    "motion_add",
    "motion_scale",
    "force_add",
    "force_sub",
    "force_scale",
    "spatial_dot",
    "cross_motion",
    "cross_force",
    "transform_motion",
    "transform_force",
    "inverse_transform_motion",
    "inverse_transform_force",
    "compose",
    "inverse",
    "inertia_apply",
    "inertia_to_matrix",
    "matrix_apply",
    "matrix_add",
    "matrix_sub",
    "force_outer",
    "matrix_to_parent",
]
