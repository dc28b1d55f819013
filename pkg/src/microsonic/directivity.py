"""Directional radiation: baffled-disk formulas, spherical-harmonic modes of
a nonuniformly oscillating sphere, directed-beam optimization and
multi-emitter superposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import eval_legendre, j1

from .medium import Medium
from .sphere import SphereRadiator, SphereField

FIRST_J1_ZERO_OVER_PI = 1.2196698912665045  # first zero of J1, divided by pi


# ---------------------------------------------------------------------------
# baffled disk
# ---------------------------------------------------------------------------

def disk_null_angle(diameter: float, wavelength: float) -> Optional[float]:
    """Polar angle (rad) of the first radiation null of a baffled disk.

    ``sin(theta) = 1.22 lambda / d`` with the factor carried at full
    precision (first zero of J1 over pi) so the null coincides exactly
    with the zero of :func:`disk_pattern`.  Returns None when the
    wavelength is too long for a fully developed beam.
    """
    if diameter <= 0 or wavelength <= 0:
        raise ValueError("diameter and wavelength must be > 0")
    s = FIRST_J1_ZERO_OVER_PI * wavelength / diameter
    if s > 1:
        return None
    return float(np.arcsin(s))


def disk_pattern(diameter: float, wavelength: float, theta):
    """Relative baffled-piston intensity ``[2 J1(x)/x]^2``, 1 at theta = 0.

    ``x = (pi d / lambda) sin(theta)``; zero exactly at the null angle.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > np.pi / 2 + 1e-12)):
        raise ValueError("theta must lie in [0, pi/2]")
    x = np.pi * diameter / wavelength * np.sin(theta)
    out = np.ones_like(x)
    nz = np.abs(x) > 1e-12
    out[nz] = (2 * j1(x[nz]) / x[nz]) ** 2
    # series for tiny arguments: 1 - x^2/8 + O(x^4) is centred by j1 itself
    return float(out) if out.ndim == 0 else out


def disk_gain(diameter: float, wavelength: float) -> float:
    """Ratio of on-axis flux to the average over the radiating half-space.

    Computed from the exact pattern integral; tends to ``0.5 (pi d /
    lambda)^2`` for short wavelengths and to 1 for long ones.
    """
    if diameter <= 0 or wavelength <= 0:
        raise ValueError("diameter and wavelength must be > 0")
    x_m = np.pi * diameter / wavelength

    def integrand(theta):
        return disk_pattern(diameter, wavelength, theta) * np.sin(theta)

    avg, _ = quad(integrand, 0.0, np.pi / 2, limit=400)
    return float(1.0 / avg)


# ---------------------------------------------------------------------------
# spherical-harmonic modes (axisymmetric, m = 0)
# ---------------------------------------------------------------------------

class ModeTruncationError(RuntimeError):
    """Hankel recurrence overflowed before the requested order."""


def spherical_hankel_h1(lmax: int, z: complex):
    """Outgoing spherical Hankel functions h_l(z) and h_l'(z), l = 0..lmax.

    Upward recurrence (stable for h^(1)); raises ModeTruncationError if the
    values overflow before lmax.
    """
    if lmax < 0:
        raise ValueError("lmax must be >= 0")
    z = complex(z)
    h = np.zeros(max(lmax + 2, 2), dtype=complex)
    h[0] = -1j * np.exp(1j * z) / z
    h[1] = -np.exp(1j * z) * (z + 1j) / z**2
    with np.errstate(invalid="ignore", over="ignore"):
        for n in range(1, lmax + 1):
            h[n + 1] = (2 * n + 1) / z * h[n] - h[n - 1]
    h = h[:lmax + 1]
    if not np.all(np.isfinite(h)):
        raise ModeTruncationError(
            f"spherical Hankel overflow before l = {lmax} at |z| = {abs(z):g}")
    hp = np.empty(lmax + 1, dtype=complex)
    hp[0] = -h[1] if lmax >= 1 else -(-np.exp(1j * z) * (z + 1j) / z**2)
    ls = np.arange(1, lmax + 1)
    if lmax >= 1:
        hp[1:] = h[:-1] - (ls + 1) / z * h[1:]
    return h, hp


@dataclass(frozen=True)
class ModeBank:
    """Transfer quantities for modes l = 0..lmax of a sphere of radius a.

    Everything is per unit surface radial-velocity amplitude of the mode:
    ``surface_pressure[l]`` is p_l(a), ``power_coefficient[l]`` the
    time-averaged input power for |V_l| = 1 (normal-stress work integrated
    over the sphere), and ``pressure_at``/``velocity_at`` give the radial
    transfer at distance r (the full field carries an extra Legendre factor
    P_l(cos theta)).
    """

    a: float
    f: float
    medium: Medium
    lmax: int
    k: complex
    surface_pressure: np.ndarray
    power_coefficient: np.ndarray
    _amp: np.ndarray = field(repr=False, default=None)

    def pressure_at(self, r: float) -> np.ndarray:
        h, _ = spherical_hankel_h1(self.lmax, self.k * r)
        return self._amp * h

    def velocity_at(self, r: float) -> np.ndarray:
        w = 2 * np.pi * self.f
        _, hp = spherical_hankel_h1(self.lmax, self.k * r)
        return -1j * w * self._amp * hp / (self.medium.c**2 * self.k * self.medium.rho)

    def flux_at(self, r: float) -> np.ndarray:
        """Single-mode on-axis flux transfer at distance r, per |V_l|^2."""
        return 0.5 * np.real(self.pressure_at(r) * np.conj(self.velocity_at(r)))


def mode_bank(lmax: int, a: float, f: float, medium: Medium) -> ModeBank:
    """Build the axisymmetric mode transfers for l = 0..lmax."""
    if a <= 0 or f <= 0:
        raise ValueError("radius and frequency must be > 0")
    w = 2 * np.pi * f
    k = medium.wave_vector(f).k
    visc = medium.effective_viscosity(f)
    za = k * a
    h_a, hp_a = spherical_hankel_h1(lmax, za)
    ls = np.arange(lmax + 1)
    hpp_a = -(2 / za) * hp_a + (ls * (ls + 1) / za**2 - 1) * h_a
    # amplitude giving unit radial velocity at the surface
    amp = 1j * medium.c**2 * k * medium.rho / (w * hp_a)
    p_a = amp * h_a
    dvdr_a = -1j * w * amp * hpp_a / (medium.c**2 * medium.rho)
    divv_a = 1j * w * p_a / (medium.c**2 * medium.rho)
    t_rr = (p_a - 2 * visc.shear * dvdr_a
            - (visc.bulk - 2 * visc.shear / 3) * divv_a)
    beta = 0.5 * np.real(t_rr) * 4 * np.pi * a**2 / (2 * ls + 1)
    return ModeBank(a=a, f=f, medium=medium, lmax=lmax, k=k,
                    surface_pressure=p_a, power_coefficient=beta, _amp=amp)


def sphere_mode_transfer(l: int, a: float, f: float, medium: Medium, r: float):
    """(surface pressure, far-field flux transfer at r, input power), per
    unit radial-velocity amplitude of mode l."""
    if l < 0:
        raise ValueError("mode order must be >= 0")
    bank = mode_bank(l, a, f, medium)
    return (bank.surface_pressure[l], float(bank.flux_at(r)[l]),
            float(bank.power_coefficient[l]))


@dataclass(frozen=True)
class ModeWeights:
    """Complex surface-velocity amplitudes per spherical-harmonic order."""

    weights: np.ndarray            # V_l, m/s
    a: float
    f: float
    medium: Medium

    @property
    def lmax(self) -> int:
        return len(self.weights) - 1

    def total_input_power(self) -> float:
        bank = mode_bank(self.lmax, self.a, self.f, self.medium)
        return float(np.sum(bank.power_coefficient * np.abs(self.weights) ** 2))

    def field_at(self, r: float, theta):
        """Complex (pressure, radial velocity) at (r, theta)."""
        bank = mode_bank(self.lmax, self.a, self.f, self.medium)
        theta = np.asarray(theta, dtype=float)
        leg = np.stack([eval_legendre(l, np.cos(theta))
                        for l in range(self.lmax + 1)])
        p = np.tensordot(self.weights * bank.pressure_at(r), leg, axes=1)
        v = np.tensordot(self.weights * bank.velocity_at(r), leg, axes=1)
        return p, v

    def flux_at(self, r: float, theta):
        p, v = self.field_at(r, theta)
        return 0.5 * np.real(p * np.conj(v))


@dataclass(frozen=True)
class DirectivityPattern:
    """Sampled time-averaged flux versus polar angle on a sphere of radius R."""

    radius: float
    theta: np.ndarray              # rad, in [0, pi]
    flux: np.ndarray               # W/m^2
    provenance: str                # analytic | FEM | disk

    def __post_init__(self):
        if len(self.theta) != len(self.flux):
            raise ValueError("theta and flux must have equal length")

    @property
    def max_flux(self) -> float:
        return float(np.max(self.flux))

    @property
    def min_flux(self) -> float:
        return float(np.min(self.flux))

    def flux_interp(self, theta):
        return np.interp(theta, self.theta, self.flux)

    def total_power(self) -> float:
        """Pattern integral: 2 pi R^2 int flux sin(theta) dtheta."""
        return float(2 * np.pi * self.radius**2
                     * np.trapezoid(self.flux * np.sin(self.theta), self.theta))

    def directional_average(self) -> float:
        """Average flux over the full sphere of directions."""
        return self.total_power() / (4 * np.pi * self.radius**2)


@dataclass(frozen=True)
class BeamSolution:
    """Result of the directed-beam optimization."""

    weights: ModeWeights
    flux: float                # at (d, theta = 0), W/m^2
    uniform_flux: float        # l = 0 only, same input power
    enhancement: float
    lmax_used: int
    truncated: bool            # stopped by overflow or the order cap

    def pattern(self, R: float, n_theta: int = 721) -> DirectivityPattern:
        theta = np.linspace(0.0, np.pi, n_theta)
        return DirectivityPattern(radius=R, theta=theta,
                                  flux=self.weights.flux_at(R, theta),
                                  provenance="analytic")


DEFAULT_LMAX_CAP = 200


def optimize_directed_beam(a: float, f: float, medium: Medium, P_in: float,
                           d: float, lmax: Optional[int] = None,
                           lmax_cap: int = DEFAULT_LMAX_CAP) -> BeamSolution:
    """Mode weights maximizing flux at (d, theta=0) for fixed input power.

    The far-field flux is the squared magnitude of a linear functional of
    the weights while the input power is a positive diagonal quadratic
    form, so the optimum is the Cauchy-Schwarz weighting ``V_l ~
    conj(pressure transfer) / power coefficient``.  The truncation order is
    grown until the optimized flux changes by less than 1%, up to
    ``lmax_cap``.
    """
    if P_in <= 0:
        raise ValueError("P_in must be > 0")
    if d <= a:
        raise ValueError("target distance must exceed the radius")

    def solve(L):
        bank = mode_bank(L, a, f, medium)
        tp = bank.pressure_at(d)
        tv = bank.velocity_at(d)
        beta = bank.power_coefficient
        w0 = np.sqrt(P_in / beta[0])
        flux_uniform = 0.5 * np.real(tp[0] * w0 * np.conj(tv[0] * w0))
        wts = np.conj(tp) / beta
        wts *= np.sqrt(P_in / np.sum(beta * np.abs(wts) ** 2))
        flux_dir = 0.5 * np.real(np.sum(tp * wts) * np.conj(np.sum(tv * wts)))
        return wts, flux_dir, flux_uniform

    k = medium.wave_vector(f).k
    if lmax is not None:
        wts, flux_dir, flux_uni = solve(lmax)
        used, truncated = lmax, False
    else:
        used = int(np.ceil(2 * abs(k) * a)) + 12
        truncated = False
        wts, flux_dir, flux_uni = solve(used)
        while True:
            nxt = min(used + 8, lmax_cap)
            if nxt == used:
                truncated = True
                break
            try:
                wts2, flux2, flux_uni = solve(nxt)
            except ModeTruncationError:
                truncated = True
                break
            grew = abs(flux2 - flux_dir) / flux_dir
            wts, flux_dir, used = wts2, flux2, nxt
            if grew < 0.01:
                break

    weights = ModeWeights(weights=wts, a=a, f=f, medium=medium)
    return BeamSolution(weights=weights, flux=float(flux_dir),
                        uniform_flux=float(flux_uni),
                        enhancement=float(flux_dir / flux_uni),
                        lmax_used=used, truncated=truncated)


# ---------------------------------------------------------------------------
# multi-emitter superposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Emitter:
    """A pulsating-sphere emitter at a position, with complex drive."""

    position: tuple                # (x, y, z) in m
    radius: float
    frequency: float
    drive: complex                 # complex epsilon (amplitude and phase)

    def radiator(self, medium: Medium) -> SphereRadiator:
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return SphereRadiator(self.radius, self.drive, self.frequency, medium)


@dataclass(frozen=True)
class EmitterSet:
    emitters: tuple
    medium: Medium
    coherent: bool = True

    def __post_init__(self):
        pos = np.asarray([e.position for e in self.emitters], dtype=float)
        rad = np.asarray([e.radius for e in self.emitters])
        for i in range(len(self.emitters)):
            for j in range(i + 1, len(self.emitters)):
                if np.linalg.norm(pos[i] - pos[j]) < rad[i] + rad[j]:
                    raise ValueError(f"emitters {i} and {j} overlap")
        if self.coherent:
            fs = {e.frequency for e in self.emitters}
            if len(fs) > 1:
                raise ValueError("coherent emitters must share one frequency")


def superpose(emitter_set: EmitterSet, points):
    """Time-averaged intensity magnitude (W/m^2) at each grid point.

    Coherent sets sum complex fields before forming the intensity vector;
    incoherent sets sum per-emitter intensities.  Points inside an emitter
    are excluded (intensity NaN, mask False).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(points)
    valid = np.ones(n, dtype=bool)
    for e in emitter_set.emitters:
        dist = np.linalg.norm(points - np.asarray(e.position), axis=1)
        valid &= dist >= e.radius
    p_tot = np.zeros(n, dtype=complex)
    v_tot = np.zeros((n, 3), dtype=complex)
    intensity = np.zeros(n)
    for e in emitter_set.emitters:
        fld = SphereField(e.radiator(emitter_set.medium))
        delta = points - np.asarray(e.position)
        dist = np.linalg.norm(delta, axis=1)
        dist_safe = np.where(valid, dist, e.radius)
        p = fld.pressure(np.maximum(dist_safe, e.radius))
        v = fld.velocity(np.maximum(dist_safe, e.radius))
        rhat = np.zeros_like(delta)
        nz = dist > 0
        rhat[nz] = delta[nz] / dist[nz, None]
        if emitter_set.coherent:
            p_tot += p
            v_tot += v[:, None] * rhat
        else:
            ivec = 0.5 * np.real(p[:, None] * np.conj(v[:, None] * rhat))
            intensity += np.linalg.norm(ivec, axis=1)
    if emitter_set.coherent:
        ivec = 0.5 * np.real(p_tot[:, None] * np.conj(v_tot))
        intensity = np.linalg.norm(ivec, axis=1)
    intensity = np.where(valid, intensity, np.nan)
    return intensity, valid
