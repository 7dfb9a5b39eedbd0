"""Radially symmetric linear-growth variational problems on an annulus.

The BV-relaxed minimizer is computed from the flux law r g'(|u'|) = lambda
and cross-checked against a direct discrete minimizer of the relaxed energy.
"""

from .analysis import (Attained, NotAttained, check_lower_bound, check_max_principle,
                       classify_boundary_behavior, oracle_agreement, random_problems, run_sweep,
                       trace_monotonicity_study, verify_suite)
from .density import (CustomPsi, DomainError, EnergyDensity, GTildeK, MinimalSurface, PhiMu,
                      Regularized, eval_g, eval_g_prime, eval_g_prime_complement, eval_g_second,
                      inv_g_prime, inv_g_prime_gap, make_regularized, tau_window, verify_ellipticity)
from .oracle import (DensityReg, DiscreteRadialFunction, OracleConfig, OracleDidNotConverge,
                     QuadraticReg, Relaxed, discrete_energy, minimize, regularization_study)
from .solver import (EnergyBreakdown, RadialProblem, RadialSolution, closed_form_profile,
                     delta_m, delta_m_infinity, energy, profile_at, solution_with_flux, solve)

__version__ = "0.1.0"

__all__ = [
    "Attained", "NotAttained", "check_lower_bound", "check_max_principle",
    "classify_boundary_behavior", "oracle_agreement", "random_problems", "run_sweep",
    "trace_monotonicity_study", "verify_suite",
    "CustomPsi", "DomainError", "EnergyDensity", "GTildeK", "MinimalSurface", "PhiMu",
    "Regularized", "eval_g", "eval_g_prime", "eval_g_prime_complement", "eval_g_second",
    "inv_g_prime", "inv_g_prime_gap", "make_regularized", "tau_window", "verify_ellipticity",
    "DensityReg", "DiscreteRadialFunction", "OracleConfig", "OracleDidNotConverge", "QuadraticReg",
    "Relaxed", "discrete_energy", "minimize", "regularization_study",
    "EnergyBreakdown", "RadialProblem", "RadialSolution", "closed_form_profile", "delta_m",
    "delta_m_infinity", "energy", "profile_at", "solution_with_flux", "solve",
]
