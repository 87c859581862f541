from .constants import CGS, SI_CONVERSIONS, PhysicalConstants, to_si
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    integrate_finite,
    integrate_semi_infinite,
)
from .results import Method, RateResult
from .special import (
    BoseKind,
    bose_difference,
    bose_integral,
    bose_integral_closed_form,
    bose_n_times_n_plus_1,
    bose_occupation,
    j1_over_x,
    riemann_zeta,
    spherical_bessel,
)

__all__ = [
    "CGS",
    "SI_CONVERSIONS",
    "PhysicalConstants",
    "to_si",
    "DEFAULT_QUADRATURE",
    "QuadratureConfig",
    "integrate_finite",
    "integrate_semi_infinite",
    "Method",
    "RateResult",
    "BoseKind",
    "bose_difference",
    "bose_integral",
    "bose_integral_closed_form",
    "bose_n_times_n_plus_1",
    "bose_occupation",
    "j1_over_x",
    "riemann_zeta",
    "spherical_bessel",
]
