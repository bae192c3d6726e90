"""Quasi-likelihood estimation for a hidden Ornstein-Uhlenbeck state-space model.

A latent mean-reverting Gaussian diffusion X drives an observed process Y
through its drift; only Y is sampled, on an equidistant grid.  The package
provides exact simulation of (X, Y), the stationary-gain conditional-mean
filter, two-stage quasi-likelihood estimation of the noise-scale and dynamics
parameters, their asymptotic covariances, and a reproducible Monte Carlo
harness.
"""

__version__ = "0.1.0"

from .asymptotics import (AsymptoticInfo, evaluate_info, gamma1, gamma2,
                          gamma2_closed_form_1d, gamma2_quadrature, standardized_errors)
from .errors import (AssumptionError, ConfigurationError, ConvergenceError, DomainError,
                     HiddenOUError, InstabilityError, NumericError, SubspaceDegenerateError)
from .estimate import (EstimationResult, estimate_path, h1_objective, h2_objective,
                       identifiability_scan, maximize_box, maximize_h1, maximize_h2,
                       theta1_closed_form_1d, y1, y2, y2_closed_form_1d)
from .filtering import FilterKernel, FilterPath, filter_step, run_continuous_reference, \
    run_discrete_filter
from .linalg import SpectralSplit, expm, gramian, spectral_split
from .mc import McConfig, McSummary, ReplicationRow, run_mc, summarize
from .model import (Coefficients, ModelSpec, SamplingScheme, ThetaPoint,
                    check_stability_region, coeff_derivatives, diagonal_family,
                    eval_coeffs, scalar_family)
from .riccati import (ControllabilityReport, RiccatiSolution, check_controllability,
                      integrate_riccati_ode, solve_are)
from .simulate import ObservationPath, exact_transition, simulate_path, stationary_x_cov

__all__ = [
    "AssumptionError", "AsymptoticInfo", "Coefficients", "ConfigurationError",
    "ControllabilityReport", "ConvergenceError", "DomainError", "EstimationResult",
    "FilterKernel", "FilterPath", "HiddenOUError", "InstabilityError", "McConfig",
    "McSummary", "ModelSpec", "NumericError", "ObservationPath", "ReplicationRow",
    "RiccatiSolution", "SamplingScheme", "SpectralSplit", "SubspaceDegenerateError",
    "ThetaPoint", "check_controllability", "check_stability_region", "coeff_derivatives",
    "diagonal_family", "estimate_path", "eval_coeffs", "evaluate_info", "exact_transition",
    "expm", "filter_step", "gamma1", "gamma2", "gamma2_closed_form_1d",
    "gamma2_quadrature", "gramian", "h1_objective", "h2_objective",
    "identifiability_scan", "integrate_riccati_ode", "maximize_box", "maximize_h1",
    "maximize_h2", "run_continuous_reference", "run_discrete_filter", "run_mc",
    "scalar_family", "simulate_path", "solve_are", "spectral_split",
    "standardized_errors", "stationary_x_cov", "summarize", "theta1_closed_form_1d",
    "y1", "y2", "y2_closed_form_1d",
]
