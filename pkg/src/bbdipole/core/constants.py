"""Physical constants (Gaussian-cgs) and exact SI conversion factors."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values in Gaussian-cgs units.

    The electron charge is in statcoulomb: e[statC] = e[C] * c[m/s] * 10.
    """

    hbar: float = 1.054571817e-27  # erg s
    c: float = 2.99792458e10  # cm / s
    kB: float = 1.380649e-16  # erg / K
    e_charge: float = 1.602176634e-19 * 2.99792458e9  # statC
    m_e: float = 9.1093837015e-28  # g

    def __post_init__(self):
        for name in ("hbar", "c", "kB", "e_charge", "m_e"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def classical_electron_radius(self) -> float:
        return self.e_charge**2 / (self.m_e * self.c**2)

    @property
    def thomson_cross_section(self) -> float:
        return 8.0 * math.pi / 3.0 * self.classical_electron_radius**2


CGS = PhysicalConstants()

# Gaussian unit tag -> (SI unit tag, multiplicative factor). All factors are exact.
SI_CONVERSIONS: dict[str, tuple[str, float]] = {
    "1": ("1", 1.0),
    "s^-1": ("s^-1", 1.0),
    "s": ("s", 1.0),
    "K": ("K", 1.0),
    "cm": ("m", 1e-2),
    "cm^2": ("m^2", 1e-4),
    "cm^3": ("m^3", 1e-6),
    "cm s^-1": ("m s^-1", 1e-2),
    "s cm^-1": ("s m^-1", 1e2),
    "cm^2 s^-2": ("m^2 s^-2", 1e-4),
    "g": ("kg", 1e-3),
    "g s^-1": ("kg s^-1", 1e-3),
    "dyn": ("N", 1e-5),
    "erg": ("J", 1e-7),
    "g^2 cm^2 s^-2": ("kg^2 m^2 s^-2", 1e-10),
    "g^2 cm^2 s^-3": ("kg^2 m^2 s^-3", 1e-10),
    "cm^-2 s^-1": ("m^-2 s^-1", 1e4),
    "cm^-3": ("m^-3", 1e6),
}


def to_si(value: float, unit: str) -> tuple[float, str]:
    """Convert a Gaussian-cgs value carrying ``unit`` to SI."""
    try:
        si_unit, factor = SI_CONVERSIONS[unit]
    except KeyError:
        raise KeyError(f"no SI conversion registered for unit {unit!r}") from None
    return value * factor, si_unit
