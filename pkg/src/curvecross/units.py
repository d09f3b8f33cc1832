"""Conversions between laboratory units and the internal hbar = 1 system.

Internal units are chosen so that every input of the standard parameter
set maps to a comfortable number: energy is numerically the wavenumber in
cm^-1 (i.e. the erg value divided by hc), length is the angstrom, and the
mass unit is fixed by requiring hbar = 1.  Energy and angular frequency
are then one and the same scale, and the kinetic term reads p^2/2m with
no extra constants anywhere in the physics modules.

Conversion constants are CODATA values, fixed here to 9 significant
digits; all physics tolerances in this package are far looser than the
constant uncertainty.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import UnitError

# CODATA constants (cgs).
HBAR_ERG_S = 1.054571817e-27
AMU_G = 1.66053907e-24
HC_ERG_CM = 1.98644586e-16

# One internal energy unit in erg (the energy of a 1 cm^-1 photon).
ENERGY_UNIT_ERG = HC_ERG_CM * 1.0
# One internal length unit in cm.
LENGTH_UNIT_CM = 1.0e-8
# Mass unit forced by hbar = 1:  E * m * L^2 = hbar^2.
MASS_UNIT_G = HBAR_ERG_S**2 / (ENERGY_UNIT_ERG * LENGTH_UNIT_CM**2)
# Time unit forced by hbar = 1 (seconds per internal time unit).
TIME_UNIT_S = HBAR_ERG_S / ENERGY_UNIT_ERG

# Internal time units per femtosecond, for wavepacket step sizes.
FEMTOSECOND = 1.0e-15 / TIME_UNIT_S


class Dimension(enum.Enum):
    ENERGY = "energy"
    MASS = "mass"
    LENGTH = "length"
    TIME = "time"
    COUPLING_STRENGTH = "coupling_strength"  # energy x length
    ANGULAR_FREQUENCY = "angular_frequency"


@dataclass(frozen=True)
class Quantity:
    """A value in internal units, tagged with its physical dimension.

    dimension is None for values passed through the 'internal' tag, which
    are treated as compatible with any unit on the way back out.
    """

    value: float
    dimension: Dimension | None


# With hbar = 1 these two dimensions share one numerical scale.
_EQUIVALENT = {
    Dimension.ENERGY: {Dimension.ENERGY, Dimension.ANGULAR_FREQUENCY},
    Dimension.ANGULAR_FREQUENCY: {Dimension.ENERGY, Dimension.ANGULAR_FREQUENCY},
}

# tag -> (dimension, multiply-by factor into internal units)
_UNITS = {
    "cm-1": (Dimension.ENERGY, 1.0),
    "erg": (Dimension.ENERGY, 1.0 / ENERGY_UNIT_ERG),
    "amu": (Dimension.MASS, AMU_G / MASS_UNIT_G),
    "gram": (Dimension.MASS, 1.0 / MASS_UNIT_G),
    "angstrom": (Dimension.LENGTH, 1.0),
    "cm": (Dimension.LENGTH, 1.0e-8 / LENGTH_UNIT_CM),
    "erg*angstrom": (Dimension.COUPLING_STRENGTH, 1.0 / ENERGY_UNIT_ERG),
}

_ALIASES = {
    "cm^-1": "cm-1",
    "g": "gram",
    "A": "angstrom",
    "erg*A": "erg*angstrom",
}


def _lookup(unit):
    tag = _ALIASES.get(unit, unit)
    if tag != "internal" and tag not in _UNITS:
        known = ", ".join(sorted(_UNITS) + ["internal"])
        raise UnitError(f"unknown unit tag {unit!r}; expected one of: {known}")
    return tag


def to_internal(value, unit):
    """Convert a laboratory value to internal units.

    The 'internal' tag passes the value through untyped.
    """
    tag = _lookup(unit)
    if tag == "internal":
        return Quantity(float(value), None)
    dim, factor = _UNITS[tag]
    return Quantity(float(value) * factor, dim)


def from_internal(quantity, unit):
    """Convert a Quantity back to the requested laboratory unit."""
    tag = _lookup(unit)
    if tag == "internal":
        return quantity.value
    dim, factor = _UNITS[tag]
    if quantity.dimension is not None:
        allowed = _EQUIVALENT.get(dim, {dim})
        if quantity.dimension not in allowed:
            raise UnitError(
                f"cannot express {quantity.dimension.value} in {unit!r}"
            )
    return quantity.value / factor


def wavenumber_to_angular_frequency_si(wavenumber_cm1):
    """Angular frequency in rad/s for a wavenumber in cm^-1 (2 pi c nu)."""
    c_cm_s = HC_ERG_CM / (2.0 * math.pi * HBAR_ERG_S)
    return 2.0 * math.pi * c_cm_s * wavenumber_cm1
