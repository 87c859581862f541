"""Momentum diffusion, decoherence and Einstein-Hopf drag of polarizable
particles in blackbody radiation.

All library functions take and return Gaussian-cgs quantities; SI appears
only through ``RateResult.to_si`` and the command-line front end.
"""

__version__ = "0.1.0"

from .core import CGS, Method, QuadratureConfig, RateResult
from .decoherence import decoherence_curve, decoherence_factor, lambda_from_limit
from .diffusion import (
    AirEnvironment,
    Statistics,
    ThermalEnvironment,
    air_diffusion,
    diffusion_closed_form,
    diffusion_constant,
    k_space_diffusion,
    scattering_constant_lambda,
)
from .drag import (
    RelativisticState,
    drag_closed_form,
    drag_coefficient_nonrel,
    nonrel_slopes,
    total_force_relativistic,
    two_level_drag,
)
from .equilibrium import Branch, equilibrium_residual, fokker_planck_evolve, spectrum_ode_solve
from .errors import BBDipoleError, DomainError, NumericalError
from .polarizability import DielectricSphere, Electron, TwoLevelAtom

__all__ = [
    "__version__",
    "CGS",
    "Method",
    "QuadratureConfig",
    "RateResult",
    "decoherence_curve",
    "decoherence_factor",
    "lambda_from_limit",
    "AirEnvironment",
    "Statistics",
    "ThermalEnvironment",
    "air_diffusion",
    "diffusion_closed_form",
    "diffusion_constant",
    "k_space_diffusion",
    "scattering_constant_lambda",
    "RelativisticState",
    "drag_closed_form",
    "drag_coefficient_nonrel",
    "nonrel_slopes",
    "total_force_relativistic",
    "two_level_drag",
    "Branch",
    "equilibrium_residual",
    "fokker_planck_evolve",
    "spectrum_ode_solve",
    "BBDipoleError",
    "DomainError",
    "NumericalError",
    "DielectricSphere",
    "Electron",
    "TwoLevelAtom",
]
