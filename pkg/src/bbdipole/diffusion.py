"""Momentum diffusion constants <dp^2>/dt of a polarizable particle.

General form, with S(n) the photon-statistics weight::

    <dp^2>/dt = (8 hbar^2 / 3 pi c^5) int_0^inf d omega  omega^5 alpha_I(omega) S(n)

S = n reproduces the independent-kick (Campbell) estimate, S = n^2 the
classical wave result and S = n^2 + n the quantized-field result.  All
integrals run over x = hbar omega / kB T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .core.constants import CGS
from .core.quadrature import QuadratureConfig, integrate_semi_infinite
from .core.results import Method, RateResult
from .core.special import bose_n_times_n_plus_1, bose_occupation, riemann_zeta
from .errors import ConsistencyError, DomainError, NegativeAbsorptionError, UnsupportedModelError
from .polarizability import (
    DielectricSphere,
    Electron,
    PolarizabilityModel,
    TwoLevelAtom,
    alpha_I_effective,
    satisfies_optical_theorem,
)

HBAR, C, KB = CGS.hbar, CGS.c, CGS.kB

P_SPACE_UNIT = "g^2 cm^2 s^-3"
K_SPACE_UNIT = "cm^-2 s^-1"


class Statistics(str, Enum):
    PARTICLE = "particle_n"
    WAVE = "wave_n2"
    FULL = "full_n2_plus_n"

    @classmethod
    def parse(cls, value: "Statistics | str") -> "Statistics":
        aliases = {"particle": cls.PARTICLE, "n": cls.PARTICLE, "wave": cls.WAVE,
                   "n2": cls.WAVE, "full": cls.FULL, "n2_plus_n": cls.FULL}
        if isinstance(value, str) and value in aliases:
            return aliases[value]
        return cls(value)


def statistics_factor(stat: Statistics, x):
    """Photon-statistics weight S(n(x)) entering the diffusion integrand."""
    n = bose_occupation(x)
    if stat is Statistics.PARTICLE:
        return n
    if stat is Statistics.WAVE:
        return n * n
    return n * (n + 1.0)


def statistics_of_occupation(stat: Statistics, n):
    """S(n) for an arbitrary occupation value (used to build balance ODEs)."""
    if stat is Statistics.PARTICLE:
        return n
    if stat is Statistics.WAVE:
        return n * n
    return n * n + n


@dataclass(frozen=True)
class ThermalEnvironment:
    T: float
    statistics: Statistics = Statistics.FULL

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError("temperature must be positive")
        object.__setattr__(self, "statistics", Statistics.parse(self.statistics))

    @property
    def omega_T(self) -> float:
        """Thermal angular frequency kB T / hbar."""
        return KB * self.T / HBAR


@dataclass(frozen=True)
class AirEnvironment:
    T: float
    m_air: float
    number_density: float
    radius: float

    def __post_init__(self):
        if not (self.T > 0 and self.m_air > 0 and self.radius > 0):
            raise DomainError("T, m_air and radius must be positive")
        if self.number_density < 0:
            raise DomainError("number density must be non-negative")


def _breakpoints(model: PolarizabilityModel, omega_T: float):
    if isinstance(model, TwoLevelAtom):
        x0, w = model.omega0 / omega_T, model.beta / omega_T
        return [max(x0 - 50 * w, 0.0), max(x0 - w, 0.0), x0, x0 + w, x0 + 50 * w]
    return None


def _scale(model: PolarizabilityModel, omega_T: float) -> float:
    # two-level weights concentrated at the line may sit far beyond x = 30
    if isinstance(model, TwoLevelAtom):
        return max(1.0, 2 * model.omega0 / omega_T / 30.0)
    return 1.0


def thermal_moment(
    model: PolarizabilityModel,
    T: float,
    power: int,
    weight,
    cfg: QuadratureConfig | None = None,
    allow_gain: bool = False,
) -> tuple[float, float]:
    """int_0^inf d omega omega^power alpha_I(omega) weight(x), x = hbar omega/kB T.

    Returns (value, err) in cgs.  Negative alpha_I raises
    NegativeAbsorptionError unless ``allow_gain``.
    """
    omega_T = KB * T / HBAR
    ref = abs(alpha_I_effective(model, omega_T))
    if isinstance(model, TwoLevelAtom):
        ref = abs(model.alpha_I_lorentzian(model.omega0)) or 1.0
    ref = ref or 1.0

    def integrand(x):
        a = alpha_I_effective(model, x * omega_T)
        if a < 0 and not allow_gain:
            raise NegativeAbsorptionError(
                "negative alpha_I (population inversion); diffusion/drag integrals refused"
            )
        return x**power * (a / ref) * weight(x)

    val, err = integrate_semi_infinite(integrand, _scale(model, omega_T), cfg,
                                       points=_breakpoints(model, omega_T))
    factor = ref * omega_T ** (power + 1)
    return val * factor, err * factor


def diffusion_constant(
    model: PolarizabilityModel, env: ThermalEnvironment, cfg: QuadratureConfig | None = None
) -> RateResult:
    """<dp^2>/dt by quadrature with the environment's photon statistics."""
    stat = env.statistics
    val, err = thermal_moment(model, env.T, 5, lambda x: statistics_factor(stat, x), cfg)
    pref = 8 * HBAR**2 / (3 * math.pi * C**5)
    return RateResult(pref * val, P_SPACE_UNIT, pref * err, Method.QUADRATURE)


def _bose_moment(s: int, stat: Statistics) -> float:
    """int_0^inf x^s S(n(x)) dx from Gamma and zeta."""
    g = math.gamma(s + 1)
    if stat is Statistics.PARTICLE:
        return g * riemann_zeta(s + 1)
    if stat is Statistics.FULL:
        return g * riemann_zeta(s)
    return g * (riemann_zeta(s) - riemann_zeta(s + 1))


def diffusion_closed_form(
    model: PolarizabilityModel, T: float, statistics: Statistics | str = Statistics.FULL
) -> RateResult:
    """Closed forms for the electron and the dielectric sphere.

    Electron (alpha_I = c sigma_T / 4 pi omega): full statistics gives
    (64 pi^3/135) r_e^2 (kB T)^5 / (hbar^3 c^4), particle statistics
    (128/3 pi) zeta(5) r_e^2 (kB T)^5 / (hbar^3 c^4).
    Sphere: hbar^2 (1024 pi^7/135) a^6 c |CM|^2 (kB T / hbar c)^9 (full) and
    hbar^2 * 2 Lambda (particle).  Wave-only values are the difference.
    """
    if not T > 0:
        raise DomainError("temperature must be positive")
    stat = Statistics.parse(statistics)
    kT = KB * T
    if isinstance(model, Electron):
        re2 = model.classical_radius**2
        if stat is Statistics.FULL:
            val = 64 * math.pi**3 / 135 * re2 * kT**5 / (HBAR**3 * C**4)
        elif stat is Statistics.PARTICLE:
            val = 128 / (3 * math.pi) * riemann_zeta(5) * re2 * kT**5 / (HBAR**3 * C**4)
        else:
            val = 16 / (9 * math.pi) * re2 * _bose_moment(4, stat) * kT**5 / (HBAR**3 * C**4)
    elif isinstance(model, DielectricSphere):
        geom = model.radius**6 * C * model.cm_abs2 * (kT / (HBAR * C)) ** 9
        if stat is Statistics.FULL:
            val = HBAR**2 * 1024 * math.pi**7 / 135 * geom
        elif stat is Statistics.PARTICLE:
            val = HBAR**2 * math.factorial(8) * 16 / (9 * math.pi) * riemann_zeta(9) * geom
        else:
            val = HBAR**2 * 16 / (9 * math.pi) * _bose_moment(8, stat) * geom
    else:
        raise UnsupportedModelError(f"no closed-form diffusion constant for {model.kind}")
    return RateResult(val, P_SPACE_UNIT, 0.0, Method.CLOSED_FORM)


def k_space_diffusion(
    model: PolarizabilityModel,
    env: ThermalEnvironment,
    cfg: QuadratureConfig | None = None,
    tol: float = 1e-8,
) -> RateResult:
    """<dK^2>/dt = (<dp^2>/dt) / hbar^2 with K = p / hbar.

    For models obeying the optical theorem the |alpha|^2 omega^8 form
    (16/9 pi c^8) int omega^8 |alpha|^2 S(n) d omega is computed as a second
    route and must agree to ``tol``; its value is stored in ``checks``.
    """
    p = diffusion_constant(model, env, cfg)
    res = p.scaled(1 / HBAR**2, K_SPACE_UNIT)
    if satisfies_optical_theorem(model):
        omega_T = env.omega_T
        ref = abs(model.alpha(omega_T)) ** 2
        stat = env.statistics

        def integrand(x):
            return x**8 * abs(model.alpha(x * omega_T)) ** 2 / ref * statistics_factor(stat, x)

        val, _ = integrate_semi_infinite(integrand, 1.0, cfg)
        second = 16 / (9 * math.pi * C**8) * val * ref * omega_T**9
        if abs(second - res.value) > tol * abs(res.value):
            raise ConsistencyError(
                f"K-space diffusion: alpha_I form {res.value!r} vs |alpha|^2 form {second!r}"
            )
        res = RateResult(res.value, res.unit, res.err_estimate, res.method,
                         {"abs_alpha_squared_form": second})
    return res


def scattering_constant_lambda(model: PolarizabilityModel, T: float) -> RateResult:
    """Scattering constant Lambda = (1/2) 8! (16/9 pi) zeta(9) a^6 c |CM|^2 (kB T/hbar c)^9."""
    if not isinstance(model, DielectricSphere):
        raise UnsupportedModelError("scattering constant closed form exists only for the sphere")
    if not T > 0:
        raise DomainError("temperature must be positive")
    kT = KB * T
    val = 0.5 * math.factorial(8) * 16 / (9 * math.pi) * riemann_zeta(9) \
        * model.radius**6 * C * model.cm_abs2 * (kT / (HBAR * C)) ** 9
    return RateResult(val, K_SPACE_UNIT, 0.0, Method.CLOSED_FORM)


def air_diffusion_closed_form(env: AirEnvironment) -> float:
    return (16 * env.radius**2 / 3 * env.number_density
            * math.sqrt(2 * math.pi * env.m_air) * (KB * env.T) ** 1.5)


def air_diffusion(env: AirEnvironment, cfg: QuadratureConfig | None = None, tol: float = 1e-8) -> RateResult:
    """Momentum diffusion from air-molecule kicks.

    Quadrature of (sigma_air / m_air) int dq q^3 rho(q) over the
    Maxwell-Boltzmann momentum density rho(q), with sigma_air = 2 pi a^2 / 3,
    cross-checked against (16 a^2/3)(N/V) sqrt(2 pi m_air)(kB T)^(3/2).
    """
    closed = air_diffusion_closed_form(env)
    if env.number_density == 0:
        return RateResult(0.0, P_SPACE_UNIT, 0.0, Method.CLOSED_FORM, {"quadrature": 0.0})
    sigma_air = 2 * math.pi * env.radius**2 / 3
    q0 = math.sqrt(2 * env.m_air * KB * env.T)  # q = q0 u
    # rho(q) = N/V 4 pi q^2 (2 pi m kT)^-3/2 exp(-u^2)
    val, err = integrate_semi_infinite(lambda u: u**5 * math.exp(-u * u), 1.0, cfg)
    pref = (sigma_air / env.m_air) * env.number_density * 4 * math.pi \
        * (2 * math.pi * env.m_air * KB * env.T) ** -1.5 * q0**6
    quad = pref * val
    if abs(quad - closed) > tol * abs(closed):
        raise ConsistencyError(f"air diffusion: quadrature {quad!r} vs closed form {closed!r}")
    return RateResult(closed, P_SPACE_UNIT, abs(quad - closed) + pref * err,
                      Method.CLOSED_FORM, {"quadrature": quad})
