"""Physical units.

Energies are stored in meV and times in ps. Inside the propagators hbar = 1,
so a time ``t`` in ps enters phases as ``E * t / HBAR_MEV_PS``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import UnitError

HBAR_MEV_PS = 0.6582119569
"""Reduced Planck constant in meV * ps."""

WAVENUMBER_PER_MEV = 8.065544
"""1 meV expressed in cm^-1."""

_ALIASES = {
    "mev": "meV",
    "cm-1": "cm-1",
    "cm^-1": "cm-1",
    "cm⁻¹": "cm-1",
    "1/cm": "cm-1",
    "ps-1": "ps-1",
    "ps^-1": "ps-1",
    "ps⁻¹": "ps-1",
    "1/ps": "ps-1",
    "fs": "fs",
    "ps": "ps",
}

# (dimension, factor to the base unit of that dimension)
_ENERGY_FACTOR = {
    "meV": 1.0,
    "cm-1": 1.0 / WAVENUMBER_PER_MEV,
    "ps-1": HBAR_MEV_PS,
}
_TIME_FACTOR = {"ps": 1.0, "fs": 1e-3}


@dataclass(frozen=True)
class UnitSystem:
    """Conversion constants used across the package."""

    hbar: float = HBAR_MEV_PS
    wavenumber_per_mev: float = WAVENUMBER_PER_MEV
    energy_unit: str = "meV"
    time_unit: str = "ps"


def canonical_unit(unit: str) -> str:
    """Normalise a unit spelling, raising :class:`UnitError` if unknown."""
    canon = _ALIASES.get(unit.strip().lower())
    if canon is None:
        raise UnitError(f"unknown unit {unit!r}")
    return canon


def dimension_of(unit: str) -> str:
    unit = canonical_unit(unit)
    return "energy" if unit in _ENERGY_FACTOR else "time"


def convert(value, from_unit: str, to_unit: str):
    """Convert ``value`` between two units of the same dimension.

    Energy units are meV, cm^-1 and ps^-1 (angular frequency, E = hbar * w);
    time units are fs and ps.

    >>> round(convert(800, "cm-1", "meV"), 2)
    99.19
    """
    src, dst = canonical_unit(from_unit), canonical_unit(to_unit)
    if src in _ENERGY_FACTOR and dst in _ENERGY_FACTOR:
        return value * (_ENERGY_FACTOR[src] / _ENERGY_FACTOR[dst])
    if src in _TIME_FACTOR and dst in _TIME_FACTOR:
        return value * (_TIME_FACTOR[src] / _TIME_FACTOR[dst])
    raise UnitError(f"cannot convert {from_unit!r} to {to_unit!r}")


def to_mev(value, unit: str) -> float:
    if dimension_of(unit) != "energy":
        raise UnitError(f"{unit!r} is not an energy unit")
    return convert(value, unit, "meV")


def to_ps(value, unit: str) -> float:
    if dimension_of(unit) != "time":
        raise UnitError(f"{unit!r} is not a time unit")
    return convert(value, unit, "ps")
