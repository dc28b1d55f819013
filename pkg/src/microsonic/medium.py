"""Acoustic medium: tissue parameters, power-law attenuation and the complex
wave vector.

Global conventions owned here:

* time dependence: a physical quantity is the real part of its complex
  amplitude times ``exp(-i*omega*t)``; no other module may reinterpret
  the sign.
* all computations in SI units; unit conversions happen only at interface
  boundaries (:mod:`microsonic.units`).

Attenuation follows a sum of power laws ``alpha(f) = sum a_i * f_MHz**p_i``
with ``alpha`` in 1/m and the coefficients stored in the MHz convention.
Three presets cover water, low-attenuation tissue and high-attenuation
tissue.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TIME_SIGN = -1  # physical quantity = Re(amplitude * exp(TIME_SIGN * i*omega*t))


@dataclass(frozen=True)
class PhysicalConventions:
    """Sign and unit conventions shared by every module."""

    time_sign: int = TIME_SIGN
    unit_system: str = "SI"
    boundary_aliases: tuple = ("um", "MHz", "pW", "pW/um2", "zJ")


CONVENTIONS = PhysicalConventions()


@dataclass(frozen=True)
class AttenuationModel:
    """Pressure attenuation ``alpha(f) = sum a_i * (f/1 MHz)**p_i`` in 1/m.

    Terms are ``(coefficient, exponent)`` pairs with nonnegative
    coefficients and positive exponents, so ``alpha(0) = 0`` and ``alpha``
    is nondecreasing in frequency by construction.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple((float(a), float(p)) for a, p in self.terms)
        for a, p in terms:
            if a < 0:
                raise ValueError(f"attenuation coefficient must be >= 0, got {a}")
            if p <= 0:
                raise ValueError(f"attenuation exponent must be > 0, got {p}")
        object.__setattr__(self, "terms", terms)

    def alpha(self, f):
        """Attenuation in 1/m at frequency ``f`` (Hz). Accepts arrays."""
        f = np.asarray(f, dtype=float)
        if np.any(f < 0):
            raise ValueError("frequency must be >= 0")
        fm = f / 1e6
        out = sum(a * fm**p for a, p in self.terms)
        return float(out) if np.isscalar(out) or out.ndim == 0 else out

    def attenuation_distance(self, f):
        """Characteristic distance 1/alpha in m (inf where alpha == 0)."""
        a = np.asarray(self.alpha(f), dtype=float)
        with np.errstate(divide="ignore"):
            d = np.where(a > 0, 1.0 / np.where(a > 0, a, 1.0), np.inf)
        return float(d) if d.ndim == 0 else d


WATER_ATTENUATION = AttenuationModel(terms=((0.025, 2.0),))
LOW_ATTENUATION = AttenuationModel(terms=((0.5, 1.36), (0.025, 2.0)))
HIGH_ATTENUATION = AttenuationModel(terms=((5.2, 1.28), (0.137, 2.0)))

ATTENUATION_PRESETS = {
    "water": WATER_ATTENUATION,
    "low": LOW_ATTENUATION,
    "high": HIGH_ATTENUATION,
}


@dataclass(frozen=True)
class WaveVector:
    """Complex wave vector ``k = omega/c + i*alpha`` at frequency ``f``."""

    k: complex
    f: float
    c: float

    def __post_init__(self):
        if self.f <= 0:
            raise ValueError("frequency must be > 0")
        if self.k.imag < 0 or self.k.real <= 0:
            raise ValueError("wave vector must have Re k > 0 and Im k >= 0")

    @property
    def omega(self) -> float:
        return 2 * np.pi * self.f

    @property
    def alpha(self) -> float:
        return self.k.imag

    @property
    def wavelength(self) -> float:
        return self.c / self.f


class EffectiveViscosity(NamedTuple):
    """Viscosity combination implied by the attenuation at one frequency.

    ``total`` is ``(4/3)*eta + xi = 2 c^3 rho alpha / omega^2``.  The split
    used throughout the package sets ``xi = (2/3)*eta`` (which keeps the
    identity exact and makes the second-viscosity stress term
    ``(xi - 2/3 eta) div v`` vanish), so ``eta = c^3 rho alpha / omega^2``.
    """

    total: float
    shear: float
    bulk: float


@dataclass(frozen=True)
class Medium:
    """Homogeneous acoustic medium with thermal constants.

    Defaults are the tissue values used throughout: water-like sound speed
    and density at body temperature.
    """

    c: float = 1500.0              # speed of sound, m/s
    rho: float = 1000.0            # density, kg/m^3
    T_body: float = 310.0          # ambient temperature, K
    k_thermal: float = 0.6         # thermal conductivity, W/m/K
    c_thermal: float = 4200.0      # heat capacity, J/kg/K
    attenuation: AttenuationModel = LOW_ATTENUATION
    name: str = "low"

    def __post_init__(self):
        for field in ("c", "rho", "T_body", "k_thermal", "c_thermal"):
            if getattr(self, field) <= 0:
                raise ValueError(f"{field} must be > 0")

    @classmethod
    def preset(cls, name: str, **overrides) -> "Medium":
        if name not in ATTENUATION_PRESETS:
            raise ValueError(
                f"unknown medium preset {name!r}; choose from {sorted(ATTENUATION_PRESETS)}")
        return cls(attenuation=ATTENUATION_PRESETS[name], name=name, **overrides)

    def with_attenuation(self, model: AttenuationModel, name: str = "custom") -> "Medium":
        return dataclasses.replace(self, attenuation=model, name=name)

    def alpha(self, f):
        return self.attenuation.alpha(f)

    def wavelength(self, f):
        return self.c / np.asarray(f, dtype=float)

    def wave_vector(self, f: float) -> WaveVector:
        if f <= 0:
            raise ValueError("frequency must be > 0")
        k = 2 * np.pi * f / self.c + 1j * self.alpha(f)
        return WaveVector(k=k, f=float(f), c=self.c)

    def effective_viscosity(self, f: float) -> EffectiveViscosity:
        if f <= 0:
            raise ValueError("frequency must be > 0")
        omega = 2 * np.pi * f
        total = 2 * self.c**3 * self.rho * self.alpha(f) / omega**2
        eta = 0.5 * total
        return EffectiveViscosity(total=total, shear=eta, bulk=2 * eta / 3)


WATER = Medium.preset("water")
LOW_TISSUE = Medium.preset("low")
HIGH_TISSUE = Medium.preset("high")


def attenuation(model: AttenuationModel, f) -> float:
    """Attenuation in 1/m at frequency ``f`` (Hz)."""
    return model.alpha(f)


def wave_vector(medium: Medium, f: float) -> WaveVector:
    return medium.wave_vector(f)


def effective_viscosity(medium: Medium, f: float) -> EffectiveViscosity:
    return medium.effective_viscosity(f)
