"""Acoustic communication between micron-scale radiators in tissue.

Analytic and numerical acoustic field solutions in lossy media, directed
acoustic beams, ultrasonic link budgets under thermal noise, and
safety-envelope checks -- at desk scale.
"""

__version__ = "0.1.0"

from .medium import (AttenuationModel, Medium, WaveVector,
                     ATTENUATION_PRESETS, WATER, LOW_TISSUE, HIGH_TISSUE,
                     attenuation, wave_vector, effective_viscosity)
from .sphere import (SphereRadiator, SphereField, PowerReport,
                     field_at, surface_force, input_power, power_waveform,
                     radiated_power, calibrate_epsilon, calibrated_sphere,
                     efficiency, efficiency_peak, power_report)
from .directivity import (DirectivityPattern, ModeWeights, BeamSolution,
                          Emitter, EmitterSet, disk_null_angle, disk_gain,
                          disk_pattern, sphere_mode_transfer,
                          optimize_directed_beam, superpose)
from .ringset import (RingsetGeometry, SurfaceActuation, build_mesh, solve,
                      flux_pattern, traveling_phase_pattern,
                      verify_against_sphere)
from .comms import (Receiver, LinkBudget, RelayChain, RelayNode,
                    thermal_noise, capacity, wideband_limit,
                    threshold_energy, threshold_rate, energy_per_bit,
                    evaluate_link, evaluate_relay, passage_bits,
                    min_detectable_drift, UniformSphereTransmitter,
                    DirectedSphereTransmitter, PatternTransmitter,
                    uniform_relay_chain)
from .safety import (SafetyLimits, SafetyReport, check_scenario,
                     steady_heating, power_density, heating_rate,
                     bubble_resonance, robot_resonance)
