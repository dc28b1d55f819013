"""Closed-form acoustics of a uniformly pulsating sphere in a lossy medium.

The sphere of radius ``a`` oscillates radially with relative amplitude
``epsilon``, so its surface velocity amplitude is ``v(a) = -i a omega
epsilon``.  Outgoing pressure and velocity follow the spherically symmetric
solution of the Helmholtz equation with complex wave vector; the input
power is the work of the full normal stress (pressure plus viscous terms)
against the surface motion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .medium import Medium

EPSILON_HARD_RANGE = (1e-12, 1e-2)
EPSILON_SOFT_RANGE = (1e-9, 1e-3)

WAVEFORM_SAMPLES = 512  # uniformly spaced times per period for waveforms


@dataclass(frozen=True)
class SphereRadiator:
    """A pulsating sphere: radius, relative oscillation amplitude, frequency."""

    radius: float
    epsilon: complex
    frequency: float
    medium: Medium

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be > 0")
        if self.frequency <= 0:
            raise ValueError("frequency must be > 0")
        mag = abs(self.epsilon)
        lo, hi = EPSILON_HARD_RANGE
        if not (lo <= mag <= hi):
            raise ValueError(
                f"|epsilon| = {mag:g} outside accepted range [{lo:g}, {hi:g}]")
        slo, shi = EPSILON_SOFT_RANGE
        if not (slo <= mag <= shi):
            warnings.warn(
                f"|epsilon| = {mag:g} outside the nominal range [{slo:g}, {shi:g}]",
                stacklevel=2)

    @property
    def omega(self) -> float:
        return 2 * np.pi * self.frequency

    @property
    def wave_vector(self) -> complex:
        return self.medium.wave_vector(self.frequency).k

    def surface_velocity(self) -> complex:
        return -1j * self.radius * self.omega * self.epsilon


class SphereField:
    """Evaluator for the outgoing pressure/velocity field of a radiator.

    Valid for ``r >= a``; all amplitudes carry the ``exp(-i omega t)``
    convention.
    """

    def __init__(self, radiator: SphereRadiator):
        self.radiator = radiator
        m = radiator.medium
        self._a = radiator.radius
        self._w = radiator.omega
        self._k = radiator.wave_vector
        self._c = m.c
        self._rho = m.rho
        self._eps = radiator.epsilon

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self._a * (1 - 1e-12)):
            raise ValueError("field is defined for r >= sphere radius")
        return r

    def pressure(self, r):
        a, k, c, rho, eps = self._a, self._k, self._c, self._rho, self._eps
        r = self._check(r)
        return a**3 * c**2 * k**2 * rho * eps * np.exp(-1j * k * (a - r)) / (
            r * (-1 + 1j * a * k))

    def velocity(self, r):
        a, k, w, eps = self._a, self._k, self._w, self._eps
        r = self._check(r)
        return -1j * a**3 * w * eps * (k * r + 1j) * np.exp(-1j * k * (a - r)) / (
            r**2 * (a * k + 1j))

    def velocity_gradient(self, r):
        """Radial derivative dv/dr of the radial velocity amplitude."""
        a, k, w, eps = self._a, self._k, self._w, self._eps
        r = self._check(r)
        pref = -1j * w * a**3 * eps * np.exp(-1j * k * a) / (a * k + 1j)
        return pref * np.exp(1j * k * r) * (1j * k**2 * r**2 - 2 * k * r - 2j) / r**3

    def velocity_divergence(self, r):
        """div v, via the Helmholtz identity div v = i omega p / (c^2 rho)."""
        return 1j * self._w * self.pressure(r) / (self._c**2 * self._rho)


def field_at(radiator: SphereRadiator, r):
    """Complex pressure (Pa) and radial velocity (m/s) amplitudes at r >= a."""
    fld = SphereField(radiator)
    return fld.pressure(r), fld.velocity(r)


def surface_force(radiator: SphereRadiator) -> complex:
    """Total complex radial force the sphere exerts on the fluid (N).

    The radial normal stress is ``p - 2 eta dv/dr - (xi - 2/3 eta) div v``
    with the medium's viscosity split.
    """
    fld = SphereField(radiator)
    a = radiator.radius
    visc = radiator.medium.effective_viscosity(radiator.frequency)
    t_rr = (fld.pressure(a)
            - 2 * visc.shear * fld.velocity_gradient(a)
            - (visc.bulk - 2 * visc.shear / 3) * fld.velocity_divergence(a))
    return 4 * np.pi * a**2 * t_rr


def input_power(radiator: SphereRadiator) -> float:
    """Time-averaged power the sphere expends against the fluid (W)."""
    F = surface_force(radiator)
    v = radiator.surface_velocity()
    return 0.5 * np.real(F * np.conj(v))


def power_waveform(radiator: SphereRadiator, t):
    """Instantaneous power Re(F e^{-iwt}) * Re(v e^{-iwt}) at times t (s)."""
    F = surface_force(radiator)
    v = radiator.surface_velocity()
    w = radiator.omega
    t = np.asarray(t, dtype=float)
    return np.real(F * np.exp(-1j * w * t)) * np.real(v * np.exp(-1j * w * t))


def surface_pressure_waveform(radiator: SphereRadiator, t):
    """Instantaneous surface pressure Re(p(a) e^{-iwt}) at times t (s)."""
    p_a = SphereField(radiator).pressure(radiator.radius)
    t = np.asarray(t, dtype=float)
    return np.real(p_a * np.exp(-1j * radiator.omega * t))


def waveform_times(radiator: SphereRadiator, n: int = WAVEFORM_SAMPLES):
    """One period of uniformly spaced sample times."""
    return np.arange(n) / n / radiator.frequency


def radiated_power(radiator: SphereRadiator, r):
    """(P_rad, flux) through the sphere of radius r: flux = Re(p v*)/2."""
    fld = SphereField(radiator)
    flux = 0.5 * np.real(fld.pressure(r) * np.conj(fld.velocity(r)))
    return 4 * np.pi * np.asarray(r, dtype=float)**2 * flux, flux


def max_surface_pressure(radiator: SphereRadiator) -> float:
    """max over r >= a of |p(r)|; occurs at r = a (checked, not assumed)."""
    fld = SphereField(radiator)
    a = radiator.radius
    p_a = abs(fld.pressure(a))
    probe = abs(fld.pressure(np.geomspace(a, 100 * a, 64)))
    if probe.max() > p_a * (1 + 1e-9):
        return float(probe.max())
    return float(p_a)


def calibrate_epsilon(a: float, f: float, medium: Medium, P_target: float,
                      eps0: float = 1e-6) -> float:
    """Oscillation amplitude giving time-averaged input power ``P_target``.

    Exact by the quadratic power scaling: eps = eps0 * sqrt(P/P(eps0)).
    """
    if P_target <= 0:
        raise ValueError("P_target must be > 0")
    p0 = input_power(SphereRadiator(a, eps0, f, medium))
    assert p0 > 0, "input power must be positive for a physical medium"
    return eps0 * float(np.sqrt(P_target / p0))


def calibrated_sphere(a: float, f: float, medium: Medium,
                      P_target: float) -> SphereRadiator:
    """Radiator with epsilon chosen so that input_power == P_target."""
    eps = calibrate_epsilon(a, f, medium, P_target)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SphereRadiator(a, eps, f, medium)


@dataclass(frozen=True)
class PowerReport:
    """Power bookkeeping for one radiator at one evaluation distance."""

    force: complex              # N, on the fluid
    input_power: float          # W
    radiated_power: float       # W, through radius r_eval
    flux: float                 # W/m^2 at r_eval
    max_pressure: float         # Pa
    r_eval: float               # m
    acoustic_efficiency: float
    transmission_efficiency: float
    overall_efficiency: float


def power_report(radiator: SphereRadiator, r_eval: float) -> PowerReport:
    if r_eval < radiator.radius:
        raise ValueError("evaluation distance must be >= sphere radius")
    p_in = input_power(radiator)
    p_surf, _ = radiated_power(radiator, radiator.radius)
    p_rad, flux = radiated_power(radiator, r_eval)
    acoustic = p_surf / p_in
    transmission = p_rad / p_surf if p_surf > 0 else 0.0
    return PowerReport(
        force=surface_force(radiator),
        input_power=p_in,
        radiated_power=float(p_rad),
        flux=float(flux),
        max_pressure=max_surface_pressure(radiator),
        r_eval=r_eval,
        acoustic_efficiency=float(acoustic),
        transmission_efficiency=float(transmission),
        overall_efficiency=float(acoustic * transmission),
    )


class EfficiencyBreakdown(NamedTuple):
    acoustic: float       # P_rad(a) / P_in
    transmission: float   # P_rad(d) / P_rad(a)
    overall: float        # P_rad(d) / P_in


def efficiency(a: float, f: float, medium: Medium, d: float) -> EfficiencyBreakdown:
    """Acoustic/transmission/overall efficiency at distance d (epsilon cancels)."""
    if d < a:
        raise ValueError("distance must be >= sphere radius")
    s = SphereRadiator(a, 1e-6, f, medium)
    p_in = input_power(s)
    p_surf, _ = radiated_power(s, a)
    p_d, _ = radiated_power(s, d)
    return EfficiencyBreakdown(float(p_surf / p_in), float(p_d / p_surf),
                               float(p_d / p_in))


class EfficiencyPeak(NamedTuple):
    frequency: float
    efficiency: float
    at_boundary: bool


_INVPHI = (np.sqrt(5) - 1) / 2


def efficiency_peak(a: float, medium: Medium, d: float,
                    f_range: tuple = (1e6, 1e9), rel_tol: float = 0.01) -> EfficiencyPeak:
    """Frequency maximizing overall efficiency, by golden-section on log f.

    Returns the bracket boundary with ``at_boundary=True`` when the maximum
    is not interior to ``f_range``.
    """
    lo, hi = np.log(f_range[0]), np.log(f_range[1])
    if not hi > lo:
        raise ValueError("f_range must be a nonempty bracket")

    def ov(x):
        return efficiency(a, float(np.exp(x)), medium, d).overall

    # detect a boundary maximum on a coarse scan first
    xs = np.linspace(lo, hi, 33)
    vals = [ov(x) for x in xs]
    imax = int(np.argmax(vals))
    if imax in (0, len(xs) - 1):
        f_star = float(np.exp(xs[imax]))
        return EfficiencyPeak(f_star, vals[imax], True)

    x_lo, x_hi = xs[imax - 1], xs[imax + 1]
    c = x_hi - _INVPHI * (x_hi - x_lo)
    dd = x_lo + _INVPHI * (x_hi - x_lo)
    fc, fd = ov(c), ov(dd)
    while (x_hi - x_lo) > rel_tol:  # log-space width == relative width
        if fc > fd:
            x_hi, dd, fd = dd, c, fc
            c = x_hi - _INVPHI * (x_hi - x_lo)
            fc = ov(c)
        else:
            x_lo, c, fc = c, dd, fd
            dd = x_lo + _INVPHI * (x_hi - x_lo)
            fd = ov(dd)
    x_star = 0.5 * (x_lo + x_hi)
    return EfficiencyPeak(float(np.exp(x_star)), ov(x_star), False)


def efficiency_sweep(a: float, medium: Medium, d: float, frequencies):
    """Efficiency breakdown on a frequency grid, as parallel arrays."""
    rows = [efficiency(a, float(f), medium, d) for f in frequencies]
    return (np.asarray([r.acoustic for r in rows]),
            np.asarray([r.transmission for r in rows]),
            np.asarray([r.overall for r in rows]))
