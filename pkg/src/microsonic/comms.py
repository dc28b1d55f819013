"""Communication and localization analysis: thermal noise, Shannon
capacity, threshold-detector rates, energy per bit, relay chains, passage
bit counts, and minimum detectable positional drift.

The signal-to-noise ratio is defined in natural log units (nats);
``snr_db`` converts for display only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.constants import k as K_BOLTZMANN

from .directivity import DirectivityPattern, optimize_directed_beam
from .medium import Medium
from .sphere import calibrated_sphere, radiated_power

BODY_TEMPERATURE = 310.0      # K
DEFAULT_BANDWIDTH = 200e3     # Hz
DEFAULT_SNR = 2.0             # nats


def thermal_noise(T: float, bandwidth: float) -> float:
    """Thermal noise power k_B T df (W)."""
    if T <= 0 or bandwidth < 0:
        raise ValueError("need T > 0 and bandwidth >= 0")
    return K_BOLTZMANN * T * bandwidth


def wideband_limit(p_signal: float, T: float) -> float:
    """Large-bandwidth capacity limit P / (ln 2 k_B T), bits/s."""
    return p_signal / (np.log(2) * K_BOLTZMANN * T)


def capacity(p_signal: float, T: float, bandwidth: float) -> float:
    """Shannon capacity df log2(1 + P_s/P_n) under thermal noise, bits/s."""
    if p_signal < 0:
        raise ValueError("signal power must be >= 0")
    if p_signal == 0 or bandwidth == 0:
        return 0.0
    return bandwidth * np.log2(1 + p_signal / thermal_noise(T, bandwidth))


def snr_nats(p_signal: float, p_noise: float) -> float:
    return float(np.log(p_signal / p_noise))


def snr_db(snr: float) -> float:
    return 10 * snr / np.log(10)


def threshold_energy(T: float, snr: float = DEFAULT_SNR) -> float:
    """Energy k_B T e^SNR a threshold receiver needs per bit (J)."""
    if snr < 0:
        raise ValueError("SNR threshold must be >= 0")
    return K_BOLTZMANN * T * np.exp(snr)


def threshold_rate(p_signal: float, energy: float) -> float:
    """Bit rate of a threshold receiver: P_signal / E."""
    return p_signal / energy


def energy_per_bit(p_transmit: float, rate: float) -> float:
    if rate <= 0:
        raise ValueError("rate must be > 0")
    return p_transmit / rate


@dataclass(frozen=True)
class Receiver:
    """An acoustic receiver patch."""

    area: float = 1e-12                 # m^2
    bandwidth: float = DEFAULT_BANDWIDTH
    temperature: float = BODY_TEMPERATURE
    snr_threshold: float = DEFAULT_SNR  # nats

    def __post_init__(self):
        if self.area <= 0 or self.bandwidth <= 0 or self.temperature <= 0:
            raise ValueError("area, bandwidth and temperature must be > 0")


@dataclass(frozen=True)
class LinkBudget:
    p_signal: float        # W
    p_noise: float         # W
    snr: float             # nats
    capacity: float        # bits/s at the receiver bandwidth
    wideband_limit: float  # bits/s
    threshold_rate: float  # bits/s
    energy_per_bit: float  # J/bit (transmit power / threshold rate)
    latency: float         # s
    flagged: bool = False  # direction interpolated outside pattern samples

    def to_json_dict(self) -> dict:
        return {
            "p_signal_pW": self.p_signal / 1e-12,
            "p_noise_pW": self.p_noise / 1e-12,
            "snr_nats": self.snr,
            "snr_dB": snr_db(self.snr),
            "capacity_bps": self.capacity,
            "wideband_limit_bps": self.wideband_limit,
            "threshold_rate_bps": self.threshold_rate,
            "energy_per_bit_J": self.energy_per_bit,
            "latency_s": self.latency,
        }


def budget_from_flux(flux: float, p_transmit: float, distance: float,
                     receiver: Receiver, medium: Medium,
                     flagged: bool = False) -> LinkBudget:
    p_sig = flux * receiver.area
    p_noise = thermal_noise(receiver.temperature, receiver.bandwidth)
    energy = threshold_energy(receiver.temperature, receiver.snr_threshold)
    t_rate = threshold_rate(p_sig, energy)
    return LinkBudget(
        p_signal=p_sig,
        p_noise=p_noise,
        snr=snr_nats(p_sig, p_noise) if p_sig > 0 else -np.inf,
        capacity=capacity(p_sig, receiver.temperature, receiver.bandwidth),
        wideband_limit=wideband_limit(p_sig, receiver.temperature),
        threshold_rate=t_rate,
        energy_per_bit=energy_per_bit(p_transmit, t_rate) if t_rate > 0 else np.inf,
        latency=distance / medium.c,
        flagged=flagged,
    )


# -- transmitter models ------------------------------------------------------

@dataclass(frozen=True)
class UniformSphereTransmitter:
    """Uniformly pulsating sphere calibrated to the given input power."""

    radius: float
    frequency: float
    medium: Medium
    power: float

    def flux(self, distance: float, direction: float = 0.0) -> float:
        if self.power == 0:
            return 0.0
        s = calibrated_sphere(self.radius, self.frequency, self.medium, self.power)
        _, flux = radiated_power(s, distance)
        return float(flux)

    extent = property(lambda self: self.radius)


@dataclass(frozen=True)
class DirectedSphereTransmitter:
    """Sphere driven with optimal mode weights toward direction 0."""

    radius: float
    frequency: float
    medium: Medium
    power: float

    def flux(self, distance: float, direction: float = 0.0) -> float:
        if self.power == 0:
            return 0.0
        beam = optimize_directed_beam(self.radius, self.frequency, self.medium,
                                      self.power, distance)
        if direction == 0.0:
            return beam.flux
        return float(beam.weights.flux_at(distance, direction))

    extent = property(lambda self: self.radius)


@dataclass(frozen=True)
class PatternTransmitter:
    """Transmitter whose directivity comes from a sampled pattern.

    Fluxes at other distances rescale by spherical spreading and the
    attenuation factor exp(-2 alpha (d - R_pattern)).
    """

    pattern: DirectivityPattern
    frequency: float
    medium: Medium
    power: float                      # input power the pattern was solved at
    extent: float = 10e-6

    def flux(self, distance: float, direction: float = 0.0) -> float:
        pat = self.pattern
        base = float(pat.flux_interp(direction))
        if self.direction_flagged(direction):
            warnings.warn("direction outside pattern samples; extrapolated",
                          stacklevel=2)
        alpha = self.medium.alpha(self.frequency)
        scale = (pat.radius / distance) ** 2 * np.exp(-2 * alpha * (distance - pat.radius))
        return base * scale

    def direction_flagged(self, direction: float) -> bool:
        return bool(direction < self.pattern.theta[0]
                    or direction > self.pattern.theta[-1])


def evaluate_link(transmitter, distance: float, direction: float,
                  receiver: Receiver) -> LinkBudget:
    """Link budget for one transmitter model at (distance, direction)."""
    if distance <= transmitter.extent:
        raise ValueError("distance must exceed the transmitter extent")
    if receiver.bandwidth > transmitter.frequency / 10:
        warnings.warn("receiver bandwidth above f/10; narrowband link "
                      "assumptions are strained", stacklevel=2)
    flux = transmitter.flux(distance, direction)
    flag_fn = getattr(transmitter, "direction_flagged", None)
    flagged = bool(flag_fn(direction)) if flag_fn else False
    return budget_from_flux(flux, transmitter.power, distance, receiver,
                            transmitter.medium, flagged=flagged)


# -- relay chains -------------------------------------------------------------

@dataclass(frozen=True)
class RelayNode:
    position: np.ndarray          # 3-vector, m
    transmitter: object           # any transmitter model (None for pure sink)
    frequency: float


@dataclass(frozen=True)
class RelayChain:
    nodes: tuple
    concurrent: bool = True       # all hops transmit at once

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ValueError("a relay chain needs at least two nodes")


@dataclass(frozen=True)
class RelayReport:
    hops: tuple                   # LinkBudget per hop
    end_to_end_rate: float        # min over hops, bits/s
    end_to_end_wideband: float
    latency: float                # total path length / c


def evaluate_relay(chain: RelayChain, receiver: Receiver) -> RelayReport:
    """Per-hop budgets; the chain moves at the rate of its slowest hop.

    Concurrent hops on adjacent links must use different frequencies.
    """
    hops = []
    total_len = 0.0
    for i in range(len(chain.nodes) - 1):
        a, b = chain.nodes[i], chain.nodes[i + 1]
        if chain.concurrent and i + 1 < len(chain.nodes) - 1:
            nxt = chain.nodes[i + 1]
            if a.frequency == nxt.frequency:
                raise ValueError(
                    f"adjacent concurrent hops {i} and {i+1} share frequency "
                    f"{a.frequency/1e6:g} MHz")
        dist = float(np.linalg.norm(np.asarray(b.position, dtype=float)
                                    - np.asarray(a.position, dtype=float)))
        total_len += dist
        if a.transmitter is None:
            raise ValueError(f"node {i} has no transmitter")
        hops.append(evaluate_link(a.transmitter, dist, 0.0, receiver))
    rates = [h.capacity for h in hops]
    wide = [h.wideband_limit for h in hops]
    medium_c = chain.nodes[0].transmitter.medium.c
    return RelayReport(hops=tuple(hops),
                       end_to_end_rate=float(min(rates)),
                       end_to_end_wideband=float(min(wide)),
                       latency=total_len / medium_c)


def alternating_frequencies(base: float, n: int, bandwidth: float) -> list:
    """Frequency plan for n relay nodes: alternating pair offset >= 2 df."""
    offset = 2 * bandwidth
    return [base + (i % 2) * offset for i in range(n)]


def uniform_relay_chain(n_hops: int, hop_length: float, node_power: float,
                        frequency: float, medium: Medium, radius: float = 5e-6,
                        directed: bool = True,
                        bandwidth: float = DEFAULT_BANDWIDTH) -> RelayChain:
    """Straight chain of identical sphere transmitters along z."""
    freqs = alternating_frequencies(frequency, n_hops + 1, bandwidth)
    maker = DirectedSphereTransmitter if directed else UniformSphereTransmitter
    nodes = []
    for i in range(n_hops + 1):
        tx = maker(radius, freqs[i], medium, node_power)
        nodes.append(RelayNode(position=np.array([0.0, 0.0, i * hop_length]),
                               transmitter=tx, frequency=freqs[i]))
    return RelayChain(nodes=tuple(nodes))


# -- passage bits and localization --------------------------------------------

def passage_bits(flow_speed: float, comm_radius: float, rate: float,
                 robot_count: int = 1):
    """(bits per passage, bits per robot, dwell time) for robots drifting
    past a fixed hub at the given flow speed."""
    if flow_speed <= 0:
        raise ValueError("flow speed must be > 0")
    dwell = 2 * comm_radius / flow_speed
    bits = rate * dwell
    return bits, bits / robot_count, dwell


NOT_DETECTABLE = None
DRIFT_TOL_RAD = 1e-4


def min_detectable_drift(pattern: DirectivityPattern, area: float,
                         integration_time: float, energy: float,
                         R: Optional[float] = None):
    """Smallest (dtheta, dX) drift a receiver can notice near the beam peak.

    Finds the smallest angle where the flux drops below the peak by
    ``energy / (area * dt)``, by bisection on the sampled pattern (linear
    interpolation); ``dX = R sin(dtheta)``.  Returns None when the required
    flux change exceeds the pattern's dynamic range (including the flat
    pattern).
    """
    if area <= 0 or integration_time <= 0:
        raise ValueError("area and integration time must be > 0")
    R = pattern.radius if R is None else R
    theta = pattern.theta
    flux = pattern.flux
    imax = int(np.argmax(flux))
    if theta[imax] > 0.05:  # rad; tolerate discretization jitter at the peak
        raise ValueError("pattern must have its maximum at theta = 0")
    need = energy / (area * integration_time)
    f0 = float(flux[imax])
    drop = f0 - flux
    # limit the search to the main lobe (up to the first local minimum)
    lobe_end = len(flux) - 1
    for i in range(imax + 1, len(flux) - 1):
        if flux[i + 1] > flux[i]:
            lobe_end = i
            break
    if need > drop[:lobe_end + 1].max() or need <= 0:
        return NOT_DETECTABLE

    lo, hi = theta[imax], theta[lobe_end]

    def short(th):
        return f0 - np.interp(th, theta, flux) - need

    while hi - lo > DRIFT_TOL_RAD:
        mid = 0.5 * (lo + hi)
        if short(mid) >= 0:
            hi = mid
        else:
            lo = mid
    dtheta = 0.5 * (lo + hi)
    return dtheta, R * np.sin(dtheta)
