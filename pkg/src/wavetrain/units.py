"""Conversion between natural oscillator units and laboratory units."""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants

LI7_MASS_AMU = 7.016003


@dataclass(frozen=True)
class PhysicalUnits:
    omega_x_si: float
    mass_amu: float
    lx_microns: float
    period_ms: float

    def as_dict(self) -> dict:
        """Both readings of a frequency quoted in "Hz": rad/s (adopted) and cycles/s."""
        alt = convert_units(2.0 * math.pi * self.omega_x_si, self.mass_amu)
        return {
            "omega_x_si": self.omega_x_si,
            "mass_amu": self.mass_amu,
            "lx_microns": self.lx_microns,
            "period_ms": self.period_ms,
            "reading": "omega_x in rad/s",
            "alternative_reading": {
                "reading": "omega_x in cycles/s",
                "omega_x_rad_s": alt.omega_x_si,
                "lx_microns": alt.lx_microns,
                "period_ms": alt.period_ms,
            },
        }


def oscillator_length_m(omega_x_si: float, mass_amu: float) -> float:
    return math.sqrt(constants.hbar / (mass_amu * constants.atomic_mass * omega_x_si))


def convert_units(omega_x_si: float = 20.0, mass_amu: float = LI7_MASS_AMU) -> PhysicalUnits:
    """l_x = sqrt(hbar / (m omega_x)) in micrometres and T = 2 pi / omega_x in ms; omega_x in rad/s."""
    if not omega_x_si > 0:
        raise ValueError(f"omega_x must be positive, got {omega_x_si}")
    if not mass_amu > 0:
        raise ValueError(f"mass must be positive, got {mass_amu}")
    return PhysicalUnits(
        omega_x_si=float(omega_x_si),
        mass_amu=float(mass_amu),
        lx_microns=oscillator_length_m(omega_x_si, mass_amu) * 1e6,
        period_ms=2.0 * math.pi / omega_x_si * 1e3,
    )
