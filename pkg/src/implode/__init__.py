"""Numerical construction of smooth self-similar imploding profiles for a
relativistic perfect fluid with pressure p = rho / ell."""

from .criticality import admissible, criticality_report, ell1, epsilon_star
from .errors import (DomainError, ImplodeError, InadmissibleError, NumericalError,
                     TailWarning)
from .matcher import MatchConfig, find_R0
from .params import derive_params, params_from_R, sonic_data, b_constants
from .profile import ProfileConfig, build_global_v, profile_at, solve_profile

__version__ = "0.1.0"

__all__ = [
    "admissible",
    "criticality_report",
    "ell1",
    "epsilon_star",
    "DomainError",
    "ImplodeError",
    "InadmissibleError",
    "NumericalError",
    "TailWarning",
    "MatchConfig",
    "find_R0",
    "derive_params",
    "params_from_R",
    "sonic_data",
    "b_constants",
    "ProfileConfig",
    "build_global_v",
    "profile_at",
    "solve_profile",
]
