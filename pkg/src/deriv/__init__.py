"""Derivatives of the dynamics through numeric, forward, reverse and compiled providers"""
from src.deriv.dynamics_derivatives import (
    InverseDynamicsDerivatives,
    LinearizedDynamics,
    dMdq_oracle,
    fd_derivatives,
    fd_torque_block,
    floating_base_id_derivatives,
    id_derivatives,
    id_parameter_derivatives,
    kinematics_derivatives,
)
from src.deriv.engine import DEFAULT_MODES, JacobianEngine, Provider, generic_jacobian, get_engine
from src.deriv.functions import FlatFunction, FunctionKind, build_function, inertia_parameters, sample_point
from src.deriv.numdiff import DifferenceScheme, num_diff_jacobian

__all__ = [
    "InverseDynamicsDerivatives",
    "LinearizedDynamics",
    "dMdq_oracle",
    "fd_derivatives",
    "fd_torque_block",
    "floating_base_id_derivatives",
    "id_derivatives",
    "id_parameter_derivatives",
    "kinematics_derivatives",
    "DEFAULT_MODES",
    "JacobianEngine",
    "Provider",
    "generic_jacobian",
    "get_engine",
    "FlatFunction",
    "FunctionKind",
    "build_function",
    "inertia_parameters",
    "sample_point",
    "DifferenceScheme",
    "num_diff_jacobian",
]
