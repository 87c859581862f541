"""Complex polarizability models and Rayleigh scattering quantities.

Three particle types are supported:

* :class:`Electron` - free electron with Abraham-Lorentz radiation reaction,
  alpha = -(e^2/m) / (omega^2 + i tau_e omega^3).
* :class:`DielectricSphere` - Clausius-Mossotti sphere, alpha = a^3 (eps-1)/(eps+2).
* :class:`TwoLevelAtom` - rotating-wave Lorentzian with populations p1, p2.

All quantities are Gaussian-cgs; polarizabilities are volumes (cm^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core.constants import CGS
from .errors import ConsistencyError, DomainError

C = CGS.c


@dataclass(frozen=True)
class Electron:
    mass: float = CGS.m_e
    charge: float = CGS.e_charge
    tau_e: float = field(init=False)

    kind = "electron"

    def __post_init__(self):
        if not (self.mass > 0 and self.charge > 0):
            raise DomainError("electron mass and charge must be positive")
        object.__setattr__(self, "tau_e", 2 * self.charge**2 / (3 * self.mass * C**3))

    @property
    def classical_radius(self) -> float:
        return self.charge**2 / (self.mass * C**2)

    @property
    def thomson_cross_section(self) -> float:
        return 8 * math.pi / 3 * self.classical_radius**2

    def alpha(self, omega):
        return -(self.charge**2 / self.mass) / (omega**2 + 1j * self.tau_e * omega**3)

    def alpha_I_approx(self, omega):
        """Low-frequency absorptive part e^2 tau_e / (m omega) = c sigma_T / (4 pi omega)."""
        return self.charge**2 * self.tau_e / (self.mass * omega)


@dataclass(frozen=True)
class DielectricSphere:
    radius: float
    epsilon: complex
    mass: float | None = None

    kind = "sphere"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("sphere radius must be positive")
        if self.epsilon == -2:
            raise DomainError("epsilon = -2 is the Froehlich pole")
        if self.mass is not None and not self.mass > 0:
            raise DomainError("sphere mass must be positive")

    @property
    def clausius_mossotti(self) -> complex:
        return (self.epsilon - 1) / (self.epsilon + 2)

    @property
    def cm_abs2(self) -> float:
        return abs(self.clausius_mossotti) ** 2

    @property
    def is_lossless(self) -> bool:
        return complex(self.epsilon).imag == 0

    def alpha(self, omega):
        return self.clausius_mossotti * self.radius**3 * np.ones_like(omega, dtype=complex)


@dataclass(frozen=True)
class TwoLevelAtom:
    omega0: float
    mu: float
    beta: float
    p1: float = 1.0
    p2: float = 0.0
    mass: float | None = None

    kind = "two_level"

    def __post_init__(self):
        if not (self.omega0 > 0 and self.mu > 0 and self.beta > 0):
            raise DomainError("omega0, mu and beta must be positive")
        if not (0 <= self.p1 <= 1 and 0 <= self.p2 <= 1):
            raise DomainError("populations must lie in [0, 1]")
        if abs(self.p1 + self.p2 - 1) > 1e-12:
            raise DomainError("populations must satisfy p1 + p2 = 1")

    def alpha(self, omega):
        # sign chosen so that Im(alpha) > 0 for p1 > p2 (absorption) under exp(-i omega t)
        pref = self.mu**2 / (3 * CGS.hbar) * (self.p1 - self.p2)
        return pref / (self.omega0 - omega - 1j * self.beta)

    def alpha_I_lorentzian(self, omega):
        pref = self.mu**2 / (3 * CGS.hbar) * (self.p1 - self.p2)
        return pref * self.beta / ((self.omega0 - omega) ** 2 + self.beta**2)


PolarizabilityModel = Union[Electron, DielectricSphere, TwoLevelAtom]


def _check_omega(omega):
    if np.any(~(np.asarray(omega) > 0)):
        raise DomainError("angular frequency must be > 0")


def satisfies_optical_theorem(model: PolarizabilityModel) -> bool:
    """True when Im(alpha) = (2/3)(omega/c)^3 |alpha|^2 holds identically."""
    if isinstance(model, Electron):
        return True
    if isinstance(model, DielectricSphere):
        return model.is_lossless
    return False


def alpha(model: PolarizabilityModel, omega):
    """Complex polarizability alpha(omega) [cm^3] for omega > 0."""
    _check_omega(omega)
    return model.alpha(omega)


def alpha_signed(model: PolarizabilityModel, omega):
    """alpha for any nonzero real omega.

    Electron and sphere formulas are evaluated directly at negative
    frequency; the rotating-wave two-level formula only describes the
    positive-frequency branch, so its negative branch is the conjugate.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega == 0):
        raise DomainError("alpha_signed requires omega != 0")
    if isinstance(model, TwoLevelAtom):
        return np.where(omega > 0, model.alpha(np.abs(omega)), np.conj(model.alpha(np.abs(omega))))
    return model.alpha(omega)


def radiative_alpha_I(model: PolarizabilityModel, omega):
    """Optical-theorem value (2/3)(omega/c)^3 |alpha|^2."""
    return 2.0 / 3.0 * (omega / C) ** 3 * np.abs(model.alpha(omega)) ** 2


def alpha_I_effective(model: PolarizabilityModel, omega):
    """Absorptive polarizability used by the diffusion and drag integrals.

    Returns Im(alpha) when it is nonzero and the radiative (optical-theorem)
    value when alpha is real, as for a lossless dielectric sphere.  A negative
    result signals gain (p2 > p1) and is returned as is; callers decide
    whether to accept it.
    """
    _check_omega(omega)
    if isinstance(model, DielectricSphere) and model.is_lossless:
        return radiative_alpha_I(model, omega)
    im = np.imag(model.alpha(omega))
    if np.ndim(im) == 0:
        return float(im) if im != 0 else float(radiative_alpha_I(model, omega))
    return np.where(im != 0, im, radiative_alpha_I(model, omega))


def rayleigh_cross_section(model: PolarizabilityModel, omega, tol: float = 1e-12):
    """Total Rayleigh scattering cross section (8 pi/3)(omega/c)^4 |alpha|^2 [cm^2].

    For models obeying the optical theorem the extinction form
    (4 pi omega / c) alpha_I is evaluated too and must agree to ``tol``.
    """
    _check_omega(omega)
    sigma = 8 * math.pi / 3 * (omega / C) ** 4 * np.abs(model.alpha(omega)) ** 2
    if satisfies_optical_theorem(model):
        other = 4 * math.pi * omega / C * alpha_I_effective(model, omega)
        scale = np.maximum(np.abs(sigma), np.finfo(float).tiny)
        if np.any(np.abs(other - sigma) > tol * scale):
            raise ConsistencyError("scattering and extinction forms of sigma disagree")
    return sigma


def differential_cross_section(model: PolarizabilityModel, omega, theta):
    """dsigma/dOmega = k^4 |alpha|^2 (1 + cos^2 theta)/2 for unpolarized light."""
    _check_omega(omega)
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > math.pi)):
        raise DomainError("scattering angle must lie in [0, pi]")
    k = omega / C
    return k**4 * np.abs(model.alpha(omega)) ** 2 * 0.5 * (1 + np.cos(theta) ** 2)
