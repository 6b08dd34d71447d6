"""
Featherstone dynamics algorithms over the scalar abstraction
"""
from src.dynamics.aba import aba
from src.dynamics.crba import JointSpaceInertia, crba
from src.dynamics.floating import floating_base_inverse_dynamics
from src.dynamics.linalg import cholesky, cholesky_solve, solve_spd
from src.dynamics.ltl import LtLFactorization, ltl_factorize, ltl_inverse, ltl_solve
from src.dynamics.rnea import get_nonlinear_terms, rnea
from src.dynamics.state import (
    GeneralizedState,
    no_external_forces,
    random_configuration,
    random_state,
    selection_transpose,
)

__all__ = [
    "aba",
    "rnea",
    "crba",
    "get_nonlinear_terms",
    "floating_base_inverse_dynamics",
    "JointSpaceInertia",
    "LtLFactorization",
    "ltl_factorize",
    "ltl_solve",
    "ltl_inverse",
    "cholesky",
    "cholesky_solve",
    "solve_spd",
    "GeneralizedState",
    "no_external_forces",
    "random_configuration",
    "random_state",
    "selection_transpose",
]
