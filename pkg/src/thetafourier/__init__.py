"""Fourier analysis on (theta, T)-periodic functions.

A function is (theta, T)-periodic when ``f(x + T e_j) = theta_j f(x)``.  The
package provides the conjugation to ordinary periodic functions, Fourier
coefficients in the shifted exponential basis, weighted norms, the Poincare
constant, closed-form periodic ODE solutions, a regularity diagnosis for
``d1 + c(x1) d2 + q`` and a spectral solver for it.
"""

from .core import (
    CoeffTable,
    GridSpec,
    SampledField,
    ThetaError,
    ThetaSpec,
    extend_field,
    shift_log_branch,
)
from .diophantine import DiophantineClass, classify_real
from .fourier import analyze, dilate, evaluate, modulate, plancherel_check, synthesize, translate
from .odesolve import OdeProblem, OdeSolution, resonance_test, solve_const, solve_mode_ode, solve_var
from .poincare import poincare_case, poincare_verify
from .regularity import (
    OperatorSpec,
    RegularityVerdict,
    constant_symbol,
    diagnose_constant,
    diagnose_variable,
    psi_phase,
    tilde_params,
)
from .sobolev import decay_classify, embedding_check, hs_norm
from .solver import SolveReport, apply_L, apply_L_tilde, solve_constant_L, solve_variable_L
from .transform import k_constants, lp_norm, omega_forward, omega_inverse, plain_lp_norm

__version__ = "0.1.0"
