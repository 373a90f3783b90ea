"""Kinematical invariance groups of the generalized harmonic oscillator.

Parameter systems of Riccati and Ermakov type, the Green function, dynamic
oscillator states, solution-space transformations and numerical checks for
the quadratic Schroedinger equation

    i psi_t = -a psi_xx + b x^2 psi - i c x psi_x - i d psi - f x psi + i g psi_x.
"""

from .characteristic import CharacteristicData, solve_characteristic, wronskian_residual
from .coefficients import CoefficientSet, lambda_factor, preset, tau_sigma
from .errors import (ContextMismatch, DomainError, GridTooCoarse, IntegrationError,
                     NotInvertible, OscGroupError, OverflowGuard, ParseError, QuadratureError,
                     SingularTime, TruncationWarning)
from .expr import differentiate, evaluate, parse, to_string
from .kernel import (TRIVIAL, FundamentalPoint, FundamentalSolution, KernelParameters,
                     closed_form_params, ermakov_general, fundamental_solution,
                     general_solution, riccati_general, system_residual)
from .states import (GridState, expectation, green_function, hermite, hermite_function,
                     invariant_apply, norm, oscillator_state, propagate)
from .transforms import (TransformElement, ansatz, apply, compose, conjugate, dilatation,
                         expansion, expansion_singular, free_to_osc, galilei, invert,
                         osc_reflection, osc_to_free)
from .verify import SpaceTimeBlock, pde_residual, run_suite

__all__ = [
    "CharacteristicData", "CoefficientSet", "ContextMismatch", "DomainError",
    "FundamentalPoint", "FundamentalSolution", "GridState", "GridTooCoarse",
    "IntegrationError", "KernelParameters", "NotInvertible", "OscGroupError", "OverflowGuard",
    "ParseError", "QuadratureError", "SingularTime", "SpaceTimeBlock", "TRIVIAL",
    "TransformElement", "TruncationWarning", "ansatz", "apply", "closed_form_params",
    "compose", "conjugate", "differentiate", "dilatation", "ermakov_general", "evaluate",
    "expansion", "expansion_singular", "expectation", "free_to_osc", "fundamental_solution",
    "galilei", "general_solution", "green_function", "hermite", "hermite_function",
    "invariant_apply", "invert", "lambda_factor", "norm", "osc_reflection", "osc_to_free",
    "oscillator_state", "parse", "pde_residual", "preset", "propagate", "riccati_general",
    "run_suite", "solve_characteristic", "system_residual", "tau_sigma", "to_string",
    "wronskian_residual",
]
