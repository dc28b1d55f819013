"""Unit handling at interface boundaries.

All library internals work in SI (m, s, kg, Pa, W, K).  Configuration files
and the command line accept values with explicit unit suffixes (``5um``,
``100MHz``, ``100pW``, ``1ms``); this module converts them to SI on the way
in and provides the conversion factors used when formatting reports on the
way out.
"""

from __future__ import annotations

import re

# boundary aliases: multiply by these to go from the alias to SI
UM = 1e-6            # micrometre -> m
MHZ = 1e6            # megahertz -> Hz
PW = 1e-12           # picowatt -> W
ZJ = 1e-21           # zeptojoule -> J
MS = 1e-3            # millisecond -> s
PW_PER_UM2 = 1.0     # pW/um^2 == W/m^2 numerically

#: unit suffix -> (dimension, scale to SI)
_UNIT_TABLE = {
    # length
    "m": ("length", 1.0), "mm": ("length", 1e-3), "um": ("length", 1e-6),
    "µm": ("length", 1e-6), "μm": ("length", 1e-6), "nm": ("length", 1e-9),
    # time
    "s": ("time", 1.0), "ms": ("time", 1e-3), "us": ("time", 1e-6),
    "µs": ("time", 1e-6), "ns": ("time", 1e-9),
    # frequency
    "Hz": ("frequency", 1.0), "kHz": ("frequency", 1e3),
    "MHz": ("frequency", 1e6), "GHz": ("frequency", 1e9),
    # power
    "W": ("power", 1.0), "mW": ("power", 1e-3), "uW": ("power", 1e-6),
    "nW": ("power", 1e-9), "pW": ("power", 1e-12),
    # pressure
    "Pa": ("pressure", 1.0), "kPa": ("pressure", 1e3), "MPa": ("pressure", 1e6),
    # energy
    "J": ("energy", 1.0), "pJ": ("energy", 1e-12), "fJ": ("energy", 1e-15),
    "aJ": ("energy", 1e-18), "zJ": ("energy", 1e-21),
    # temperature
    "K": ("temperature", 1.0),
    # speed
    "m/s": ("speed", 1.0), "mm/s": ("speed", 1e-3), "um/s": ("speed", 1e-6),
    # area
    "m2": ("area", 1.0), "mm2": ("area", 1e-6), "um2": ("area", 1e-12),
    # flux (pW/um^2 is numerically W/m^2)
    "W/m2": ("flux", 1.0), "pW/um2": ("flux", 1.0),
    # stiffness, mass
    "N/m": ("stiffness", 1.0),
    "kg": ("mass", 1.0), "g": ("mass", 1e-3), "fg": ("mass", 1e-18), "pg": ("mass", 1e-15),
}

_QUANTITY_RE = re.compile(
    r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([^\s\d].*?)?\s*$")


class UnitError(ValueError):
    """Raised for missing, unknown or mismatched unit suffixes."""


def parse_quantity(text: str, dimension: str) -> float:
    """Parse ``"100MHz"``-style text into an SI float of the given dimension.

    Bare numbers are rejected for physical dimensions; pass
    ``dimension="dimensionless"`` for counts and ratios.
    """
    if isinstance(text, (int, float)):
        if dimension == "dimensionless":
            return float(text)
        raise UnitError(f"physical quantity must carry a unit suffix, got {text!r}")
    m = _QUANTITY_RE.match(text)
    if not m:
        raise UnitError(f"cannot parse quantity {text!r}")
    value, unit = m.group(1), m.group(2)
    if dimension == "dimensionless":
        if unit:
            raise UnitError(f"dimensionless field must be a bare number, got {text!r}")
        return float(value)
    if not unit:
        raise UnitError(
            f"physical quantity {text!r} must carry a unit suffix (expected {dimension})")
    if unit not in _UNIT_TABLE:
        raise UnitError(f"unknown unit {unit!r} in {text!r}")
    dim, scale = _UNIT_TABLE[unit]
    if dim != dimension:
        raise UnitError(f"expected a {dimension}, got {text!r} ({dim})")
    return float(value) * scale
