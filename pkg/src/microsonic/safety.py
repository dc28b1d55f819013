"""Safety-envelope checks: acoustic flux and pressure limits, heating,
bubble resonance and the robot's own mechanical resonance.

Pressure thresholds below 1 kPa come from static or low-frequency (<100 Hz)
experiments and are reported as informational only; they never fail a
scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .medium import Medium

MAX_SAFE_FLUX = 1e4                 # W/m^2 == pW/um^2
MEMBRANOLYTIC_PRESSURE = 3e6        # Pa
RED_CELL_RUPTURE_PRESSURE = 1e6     # Pa
HEMOLYSIS_OVERPRESSURE = 1e5        # Pa, repeated low-frequency exposure
OSMOTIC_RUPTURE_PRESSURE = 300.0    # Pa (informational)
ENDOTHELIAL_STATIC_PRESSURE = 42.0  # Pa (informational)

NEUTROPHIL_POWER_DENSITY = 2e4      # W/m^3, for comparison
MUSCLE_POWER_DENSITY = (1e6, 2e6)   # W/m^3, tetanic skeletal muscle

BUBBLE_FORMULA_MAX_F = 1e6          # Hz, validity ceiling of f = 3/r


@dataclass(frozen=True)
class SafetyLimits:
    max_flux: float = MAX_SAFE_FLUX
    membranolytic: float = MEMBRANOLYTIC_PRESSURE
    red_cell_rupture: float = RED_CELL_RUPTURE_PRESSURE
    hemolysis: float = HEMOLYSIS_OVERPRESSURE
    osmotic: float = OSMOTIC_RUPTURE_PRESSURE
    endothelial_static: float = ENDOTHELIAL_STATIC_PRESSURE
    provenance_note: str = ""

    def __post_init__(self):
        ordered = (self.membranolytic, self.red_cell_rupture, self.hemolysis,
                   self.osmotic, self.endothelial_static)
        if not all(a > b for a, b in zip(ordered, ordered[1:])):
            raise ValueError("pressure thresholds must be strictly ordered")

    @classmethod
    def with_overrides(cls, provenance_note: str, **overrides) -> "SafetyLimits":
        """Custom limits require a provenance note."""
        if not provenance_note:
            raise ValueError("overriding limits requires a provenance note")
        return cls(provenance_note=provenance_note, **overrides)


DEFAULT_LIMITS = SafetyLimits()


@dataclass(frozen=True)
class SafetyCheck:
    name: str
    value: float
    limit: float
    informational: bool = False

    @property
    def margin(self) -> float:
        return self.limit / self.value if self.value > 0 else np.inf

    @property
    def passed(self) -> bool:
        return self.value <= self.limit


@dataclass(frozen=True)
class SafetyReport:
    checks: tuple
    incomplete: bool = False

    @property
    def passed(self) -> bool:
        """Overall verdict: fails iff any non-informational check fails."""
        return all(c.passed for c in self.checks if not c.informational)

    def to_json_dict(self) -> dict:
        return {
            "overall": "pass" if self.passed else "fail",
            "incomplete": self.incomplete,
            "checks": [
                {"name": c.name, "value": c.value, "limit": c.limit,
                 "margin": c.margin,
                 "status": ("informational" if c.informational
                            else "pass" if c.passed else "fail")}
                for c in self.checks],
        }


def check_scenario(max_flux: Optional[float], max_pressure: Optional[float],
                   limits: SafetyLimits = DEFAULT_LIMITS) -> SafetyReport:
    """Compare a scenario's peak flux (W/m^2) and pressure (Pa) to limits."""
    checks = []
    incomplete = False
    if max_flux is None:
        incomplete = True
    else:
        checks.append(SafetyCheck("acoustic flux", max_flux, limits.max_flux))
    if max_pressure is None:
        incomplete = True
    else:
        checks.extend([
            SafetyCheck("membranolytic pressure", max_pressure, limits.membranolytic),
            SafetyCheck("red-cell rupture pressure", max_pressure,
                        limits.red_cell_rupture),
            SafetyCheck("repeated-overpressure hemolysis", max_pressure,
                        limits.hemolysis),
            SafetyCheck("osmotic membrane tension (low-frequency data)",
                        max_pressure, limits.osmotic, informational=True),
            SafetyCheck("endothelial static pressure (low-frequency data)",
                        max_pressure, limits.endothelial_static,
                        informational=True),
        ])
    return SafetyReport(checks=tuple(checks), incomplete=incomplete)


def steady_heating(power: float, r: float, medium: Medium) -> float:
    """Steady-state conduction temperature rise P/(4 pi r k_thermal), K."""
    if power < 0:
        raise ValueError("power must be >= 0")
    if r <= 0:
        raise ValueError("distance must be > 0")
    return power / (4 * np.pi * r * medium.k_thermal)


def power_density(power: float, a: float) -> float:
    """Dissipated power per robot volume, W/m^3."""
    if a <= 0:
        raise ValueError("radius must be > 0")
    return power / (4.0 / 3.0 * np.pi * a**3)


def heating_rate(intensity: float, f: float, medium: Medium) -> float:
    """Initial tissue heating rate in K/min for a plane wave of the given
    intensity: 2 alpha I / (rho c_thermal).

    Order-of-magnitude estimate only: it assumes full local absorption of
    a plane wave and no conduction or perfusion.
    """
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    rate_per_s = 2 * medium.alpha(f) * intensity / (medium.rho * medium.c_thermal)
    return rate_per_s * 60.0


@dataclass(frozen=True)
class ResonanceEstimate:
    frequency: float
    in_formula_range: bool = True


def bubble_resonance(r_bubble: float) -> ResonanceEstimate:
    """Resonant frequency of an air bubble in water, f = 3/r (Hz).

    The formula holds up to about 1 MHz; above that the estimate is
    flagged out of range.
    """
    if r_bubble <= 0:
        raise ValueError("bubble radius must be > 0")
    f = 3.0 / r_bubble
    return ResonanceEstimate(frequency=f, in_formula_range=f <= BUBBLE_FORMULA_MAX_F)


def robot_resonance(stiffness: float, mass: float) -> float:
    """Lowest mechanical resonance (1/2pi) sqrt(k_s/m), Hz."""
    if stiffness <= 0 or mass <= 0:
        raise ValueError("stiffness and mass must be > 0")
    return float(np.sqrt(stiffness / mass) / (2 * np.pi))
