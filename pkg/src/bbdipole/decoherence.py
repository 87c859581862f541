"""Two-dipole photon emission rates and the decoherence factor F(d) = R11 - R12.

The interference rate between dipoles separated by d is::

    R12(d) = (c / 8 pi^3) int dk k^6 |alpha|^2 n_k I(kd)

with the angular kernel I(x) = int dOmega dOmega' exp(i x (k - k').d) (1 + cos^2 theta).
Only normally ordered terms enter, so the occupation weight is n rather
than n(n+1); the small-d curvature of F is therefore the particle-statistics
scattering constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core.constants import CGS
from .core.quadrature import QuadratureConfig, integrate_semi_infinite
from .core.special import bose_occupation, j1_over_x, spherical_bessel
from .errors import DomainError, ExtractionError
from .polarizability import PolarizabilityModel, TwoLevelAtom, rayleigh_cross_section

HBAR, C, KB = CGS.hbar, CGS.c, CGS.kB

KERNEL_AT_ZERO = 64 * math.pi**2 / 3

# Taylor coefficients of 4/3 - [j0^2 + 2 (j1/x)^2 + (j0 - 2 j1/x)^2] in x^2, x^4, ...
_DEFICIT_SERIES = [float(Fraction(p, q)) for p, q in [
    (4, 9), (-14, 225), (22, 4725), (-64, 297675), (2, 297675), (-58, 383107725),
    (74, 28733079375), (-184, 5373085843125), (16, 43752270436875),
]]
_SERIES_BELOW = 0.5


def _bessel_bracket(x):
    j0 = spherical_bessel(0, x)
    t = j1_over_x(x)
    return j0**2 + 2 * t**2 + (j0 - 2 * t) ** 2


def angular_kernel(x):
    """I(x) = 16 pi^2 [j0^2 + 2 (j1/x)^2 + (j0 - 2 j1/x)^2] for x = k d >= 0.

    The transverse part j1/x and longitudinal part j0 - 2 j1/x come from
    applying the (1 + cos^2 theta) tensor to the plane-wave average 4 pi j0.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("angular kernel requires x >= 0")
    out = 16 * math.pi**2 * _bessel_bracket(x)
    return float(out) if np.ndim(out) == 0 else out


def kernel_deficit(x):
    """I(0) - I(x), evaluated by series below x = 0.5 to keep relative accuracy."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("angular kernel requires x >= 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = x < _SERIES_BELOW
    x2 = x[small] ** 2
    acc = np.zeros_like(x2)
    for coeff in reversed(_DEFICIT_SERIES):
        acc = acc * x2 + coeff
    out[small] = acc * x2
    out[~small] = 4.0 / 3.0 - _bessel_bracket(x[~small])
    out *= 16 * math.pi**2
    return float(out[0]) if scalar else out


def kernel_envelope(x):
    """Upper bound on |I(x)| decaying like 32 pi^2 / x^2.

    Uses |j0| <= min(1, 1/x) and |j1/x| <= min(1/3, (1 + x)/x^3).
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        a = np.minimum(1.0, 1.0 / x)
        b = np.minimum(1.0 / 3.0, (1.0 + x) / x**3)
    out = 16 * math.pi**2 * (a**2 + 2 * b**2 + (a + 2 * b) ** 2)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DipolePairGeometry:
    separation: float

    def __post_init__(self):
        if not self.separation >= 0:
            raise DomainError("separation must be >= 0")


@dataclass(frozen=True)
class DecoherenceCurve:
    separations: list
    F_values: list
    lambda_fit: float
    fit_residual: float
    F_errors: list = field(default_factory=list)


def _thermal_k(T: float) -> float:
    if not T > 0:
        raise DomainError("temperature must be positive")
    return KB * T / (HBAR * C)


def thermal_wavelength(T: float) -> float:
    """lambda_th = 2 pi hbar c / kB T."""
    return 2 * math.pi / _thermal_k(T)


def _check_model(model: PolarizabilityModel):
    if isinstance(model, TwoLevelAtom) and model.p2 > model.p1:
        raise DomainError("decoherence rates need a nonnegative cross section (p1 >= p2)")


def _decoherence_cfg(cfg: QuadratureConfig | None) -> QuadratureConfig:
    # oscillatory kernels at large separation need more panels than the default
    base = cfg or QuadratureConfig()
    if base.max_subdivisions >= 2000:
        return base
    return QuadratureConfig(base.rel_tol, base.abs_tol, 2000, base.tail_cutoff, base.accept_rel)


def _k_integral(model, T, kernel, cfg):
    """(c / 8 pi^3) int dk k^6 |alpha(ck)|^2 n(hbar c k / kB T) kernel(k)."""
    kT = _thermal_k(T)
    omega_T = C * kT
    ref = abs(model.alpha(omega_T)) ** 2 or 1.0
    scale = 1.0
    if isinstance(model, TwoLevelAtom):
        scale = max(1.0, 2 * model.omega0 / omega_T / 30.0)

    def integrand(x):
        return x**6 * abs(model.alpha(x * omega_T)) ** 2 / ref * bose_occupation(x) * kernel(x * kT)

    val, err = integrate_semi_infinite(integrand, scale, _decoherence_cfg(cfg))
    pref = C / (8 * math.pi**3) * ref * kT**7
    return pref * val, pref * err


def emission_rates(
    model: PolarizabilityModel, T: float, geom: DipolePairGeometry, cfg: QuadratureConfig | None = None
) -> tuple[float, float]:
    """(R11, R12) in s^-1 for two identical dipoles at separation ``geom.separation``."""
    _check_model(model)
    d = geom.separation
    r11, _ = _k_integral(model, T, lambda k: KERNEL_AT_ZERO, cfg)
    if d == 0:
        return r11, r11
    r12, _ = _k_integral(model, T, lambda k: angular_kernel(k * d), cfg)
    return r11, r12


def self_rate_from_cross_section(model: PolarizabilityModel, T: float, cfg: QuadratureConfig | None = None) -> float:
    """R11 as int dq rho(q) v(q) sigma(q): photon flux density times total cross section.

    With rho(q) dq = k^2 n dk / pi^2 and v = c this is (c/pi^2) int k^2 n sigma(ck) dk,
    a route that never touches the angular kernel.
    """
    _check_model(model)
    kT = _thermal_k(T)
    omega_T = C * kT
    ref = rayleigh_cross_section(model, omega_T) or 1.0

    def integrand(x):
        return x**2 * bose_occupation(x) * rayleigh_cross_section(model, x * omega_T) / ref

    val, _ = integrate_semi_infinite(integrand, 1.0, cfg)
    return C / math.pi**2 * ref * kT**3 * val


def decoherence_factor_with_error(
    model: PolarizabilityModel, T: float, d: float, cfg: QuadratureConfig | None = None
) -> tuple[float, float]:
    """F(d) = R11 - R12 integrated directly against the kernel deficit."""
    DipolePairGeometry(d)
    _check_model(model)
    if d == 0:
        return 0.0, 0.0
    return _k_integral(model, T, lambda k: kernel_deficit(k * d), cfg)


def decoherence_factor(model: PolarizabilityModel, T: float, d: float, cfg: QuadratureConfig | None = None) -> float:
    return decoherence_factor_with_error(model, T, d, cfg)[0]


def interference_envelope(model: PolarizabilityModel, T: float, d: float, cfg: QuadratureConfig | None = None) -> float:
    """Bound on |R12(d)| = |R11 - F(d)| from the kernel envelope."""
    if d <= 0:
        raise DomainError("envelope needs d > 0")
    return _k_integral(model, T, lambda k: kernel_envelope(k * d), cfg)[0]


def lambda_from_limit(
    model: PolarizabilityModel,
    T: float,
    cfg: QuadratureConfig | None = None,
    fractions: tuple[float, float] = (1 / 100, 1 / 200),
    max_residual: float = 1e-2,
) -> tuple[float, float]:
    """Small-separation curvature of F by Richardson extrapolation.

    F(d)/d^2 = Lambda + c2 d^2 + ...; the estimate combines d = lambda_th * fractions.
    A second estimate from the next halving (d2, d2/2) gauges the fit; the
    returned residual is their relative difference and ExtractionError is
    raised when it exceeds ``max_residual``.
    """
    lam_th = thermal_wavelength(T)
    h1, h2 = (f * lam_th for f in fractions)
    h3 = h2 / 2

    def g(h):
        return decoherence_factor(model, T, h, cfg) / h**2

    def richardson(ga, gb, ha, hb):
        r2 = (ha / hb) ** 2
        return gb + (gb - ga) / (r2 - 1)

    g1, g2, g3 = g(h1), g(h2), g(h3)
    lam = richardson(g1, g2, h1, h2)
    check = richardson(g2, g3, h2, h3)
    residual = abs(lam - check) / abs(check) if check else 0.0
    if residual > max_residual:
        raise ExtractionError(f"curvature extraction residual {residual:.3g} exceeds {max_residual}")
    return lam, residual


def decoherence_curve(
    model: PolarizabilityModel, T: float, separations, cfg: QuadratureConfig | None = None
) -> DecoherenceCurve:
    seps = [float(d) for d in separations]
    vals, errs = zip(*(decoherence_factor_with_error(model, T, d, cfg) for d in seps)) if seps else ((), ())
    lam, res = lambda_from_limit(model, T, cfg)
    return DecoherenceCurve(seps, list(vals), lam, res, list(errs))
