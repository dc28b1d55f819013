"""Ringset radiator on a vessel wall: geometry, surface actuation and the
numerically solved pressure field.

A ringset is an axisymmetric band of micro-robots lining the inner wall of
a small vessel; acoustically it is a rigid annulus whose selected surface
oscillates normally with a smooth amplitude taper at the face ends.  The
vessel wall itself is acoustically absent (it only appears in plots).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import cache
from .axifem import (AxiMesh, FaceSpec, FieldSolution, face_trace_power,
                     ringset_mesh, solve_helmholtz, sphere_mesh)
from .directivity import DirectivityPattern
from .medium import Medium
from .sphere import SphereRadiator, input_power as sphere_input_power, \
    radiated_power as sphere_radiated_power, field_at as sphere_field_at

DEFAULT_R_DOM = 130e-6
SOLVER_VERSION = 3


@dataclass(frozen=True)
class RingsetGeometry:
    """Ringset dimensions (metres)."""

    length: float = 10e-6
    R_outer: float = 4e-6
    R_inner: float = 3e-6
    taper: float = 0.1e-6

    def __post_init__(self):
        if not 0 < self.R_inner < self.R_outer:
            raise ValueError("need 0 < R_inner < R_outer")
        if self.length <= 2 * self.taper:
            raise ValueError("length must exceed twice the taper")


@dataclass(frozen=True)
class SurfaceActuation:
    """Which surface oscillates, how strongly, and with what phase profile.

    The oscillation amplitude is ``epsilon * R_outer`` regardless of the
    selected surface, tapered smoothly to zero over the taper length at
    both ends of each actuated face.  ``traveling`` phases the motion as
    ``exp(i omega z / c)`` along the vessel axis.
    """

    surface: str = "outer"         # outer | inner | ends
    epsilon: float = 1e-6
    phase: str = "uniform"         # uniform | traveling
    phase_sign: int = 1

    def __post_init__(self):
        if self.surface not in ("outer", "inner", "ends"):
            raise ValueError(f"unknown surface selector {self.surface!r}")
        if self.phase not in ("uniform", "traveling"):
            raise ValueError(f"unknown phase profile {self.phase!r}")
        if self.phase_sign not in (-1, 1):
            raise ValueError("phase_sign must be +-1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if not 1e-7 <= self.epsilon <= 1e-5:
            warnings.warn(f"epsilon = {self.epsilon:g} outside the nominal "
                          "1e-7..1e-5 range", stacklevel=2)

    def faces(self, geom: RingsetGeometry) -> tuple:
        if self.surface == "outer":
            return (FaceSpec("outer", "cylinder", geom.R_outer, +1),)
        if self.surface == "inner":
            return (FaceSpec("inner", "cylinder", geom.R_inner, -1),)
        return (FaceSpec("end_top", "disk", geom.length / 2, +1),
                FaceSpec("end_bottom", "disk", -geom.length / 2, -1))

    def tags(self, geom: RingsetGeometry) -> tuple:
        return tuple(f.tag for f in self.faces(geom))


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def taper_profile(coord, lo: float, hi: float, taper: float):
    """Smooth ramp: 0 at the ends of [lo, hi], 1 in the middle."""
    coord = np.asarray(coord, dtype=float)
    return _smoothstep((coord - lo) / taper) * _smoothstep((hi - coord) / taper)


def normal_velocity(actuation: SurfaceActuation, geom: RingsetGeometry,
                    f: float, medium: Medium, epsilon: Optional[float] = None):
    """v_n(r, z) on the actuated faces (zero taper at face edges)."""
    eps = actuation.epsilon if epsilon is None else epsilon
    omega = 2 * np.pi * f
    amp = -1j * omega * geom.R_outer * eps

    if actuation.surface in ("outer", "inner"):
        lo, hi = -geom.length / 2, geom.length / 2

        def v_n(r, z):
            prof = taper_profile(z, lo, hi, geom.taper)
            if actuation.phase == "traveling":
                prof = prof * np.exp(1j * actuation.phase_sign * omega
                                     * np.asarray(z) / medium.c)
            return amp * prof
    else:
        lo, hi = geom.R_inner, geom.R_outer

        def v_n(r, z):
            prof = taper_profile(r, lo, hi, geom.taper)
            if actuation.phase == "traveling":
                prof = prof * np.exp(1j * actuation.phase_sign * omega
                                     * np.asarray(z) / medium.c)
            return amp * prof
    return v_n


def build_mesh(geom: RingsetGeometry, R_dom: float = DEFAULT_R_DOM,
               f: float = 100e6, h_boundary: float = 0.02e-6,
               h_far: float = 0.45e-6, use_cache: bool = True) -> AxiMesh:
    """Generate (or load) the meridian mesh and check it against f."""
    key = cache.content_key({
        "kind": "ringset-mesh", "schema": cache.SCHEMA_VERSION,
        "geom": [geom.R_inner, geom.R_outer, geom.length],
        "R_dom": R_dom, "h_boundary": h_boundary, "h_far": h_far,
    })
    mesh = _load_mesh(key, "ringset") if use_cache else None
    if mesh is None:
        mesh = ringset_mesh(geom.R_inner, geom.R_outer, geom.length, R_dom,
                            h_boundary=h_boundary, h_far=h_far)
        if use_cache:
            _store_mesh(key, mesh)
    mesh.validate_for_frequency(f, c=1500.0)
    return mesh


def _store_mesh(key: str, mesh: AxiMesh) -> None:
    arrays = {"points": mesh.points, "triangles": mesh.triangles}
    for tag, edges in mesh.boundary.items():
        arrays[f"bnd_{tag}"] = edges
    cache.store("mesh", key, arrays, {
        "R_dom": mesh.R_dom, "h_boundary": mesh.h_boundary,
        "h_far": mesh.h_far, "obstacle": mesh.obstacle,
        "obstacle_params": list(mesh.obstacle_params),
    })


def _load_mesh(key: str, obstacle: str) -> Optional[AxiMesh]:
    hit = cache.load("mesh", key)
    if hit is None:
        return None
    arrays, meta = hit
    if meta.get("obstacle") != obstacle:
        return None
    boundary = {k[4:]: v for k, v in arrays.items() if k.startswith("bnd_")}
    return AxiMesh(points=arrays["points"], triangles=arrays["triangles"],
                   boundary=boundary, R_dom=meta["R_dom"],
                   h_boundary=meta["h_boundary"], h_far=meta["h_far"],
                   obstacle=meta["obstacle"],
                   obstacle_params=tuple(meta["obstacle_params"]))


def solve(mesh: AxiMesh, actuation: SurfaceActuation, f: float, medium: Medium,
          P_target: Optional[float] = None,
          geom: Optional[RingsetGeometry] = None,
          bc: str = "curvature", use_cache: bool = True) -> FieldSolution:
    """Solve the field and, if asked, rescale to a target input power.

    Input power is the work of the normal stress (pressure plus the viscous
    shear term) against the prescribed surface motion; the field and the
    effective amplitude scale together, exactly, thanks to linearity.
    """
    if geom is None:
        geom = RingsetGeometry()
    key = cache.content_key({
        "kind": "ringset-solution", "schema": cache.SCHEMA_VERSION,
        "solver": SOLVER_VERSION,
        "geom": [geom.R_inner, geom.R_outer, geom.length, geom.taper],
        "mesh": [mesh.R_dom, mesh.h_boundary, mesh.h_far,
                 mesh.n_points, mesh.n_elements],
        "f": f, "medium": [medium.c, medium.rho, medium.attenuation.terms],
        "act": [actuation.surface, actuation.epsilon, actuation.phase,
                actuation.phase_sign],
        "P_target": P_target, "bc": bc,
    })
    if use_cache:
        hit = cache.load("solution", key)
        if hit is not None:
            arrays, meta = hit
            wv = medium.wave_vector(f)
            return FieldSolution(mesh=mesh, pressure=arrays["pressure"],
                                 f=f, medium=medium, k=wv.k,
                                 residual=meta["residual"], metadata=meta)

    v_n = normal_velocity(actuation, geom, f, medium)
    sol = solve_helmholtz(mesh, f, medium, actuation.tags(geom), v_n, bc=bc)
    total = press = 0.0
    for face in actuation.faces(geom):
        tot, prs, _ = face_trace_power(sol, face, v_n)
        total += tot
        press += prs
    eps_eff = actuation.epsilon
    if P_target is not None:
        if total <= 0:
            raise RuntimeError("non-positive input power; cannot calibrate")
        scale = float(np.sqrt(P_target / total))
        sol.pressure *= scale
        eps_eff *= scale
        total *= scale**2
        press *= scale**2
    sol.metadata.update({
        "input_power": total, "pressure_work": press,
        "shear_work": total - press, "epsilon_effective": eps_eff,
        "actuation": actuation.surface, "phase": actuation.phase,
        "P_target": P_target, "residual": sol.residual,
    })
    if use_cache:
        cache.store("solution", key, {"pressure": sol.pressure}, sol.metadata)
    return sol


def flux_pattern(sol: FieldSolution, R_eval: float = 100e-6,
                 n_theta: int = 721) -> DirectivityPattern:
    """Directivity pattern of a solved field (FEM provenance)."""
    return sol.flux_pattern(R_eval, n_theta)


@dataclass(frozen=True)
class TravelingPhaseReport:
    pattern: DirectivityPattern
    forward_flux: float
    backward_flux: float
    forward_to_average: float
    forward_to_backward: float


def traveling_phase_pattern(geom: Optional[RingsetGeometry] = None,
                            f: float = 100e6,
                            medium: Optional[Medium] = None,
                            P_target: float = 100e-12,
                            R_eval: float = 100e-6,
                            use_cache: bool = True) -> TravelingPhaseReport:
    """Directional pattern for traveling-phase actuation of the outer face."""
    geom = geom or RingsetGeometry()
    medium = medium or Medium.preset("low")
    mesh = build_mesh(geom, f=f, use_cache=use_cache)
    act = SurfaceActuation(surface="outer", phase="traveling")
    sol = solve(mesh, act, f, medium, P_target=P_target, geom=geom,
                use_cache=use_cache)
    pat = flux_pattern(sol, R_eval)
    fwd = float(pat.flux[0])
    back = float(pat.flux[-1])
    avg = pat.directional_average()
    return TravelingPhaseReport(pattern=pat, forward_flux=fwd,
                                backward_flux=back,
                                forward_to_average=fwd / avg,
                                forward_to_backward=fwd / back)


# ---------------------------------------------------------------------------
# oracle cross-validation against the closed-form sphere
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereCheck:
    """Relative errors of the FEM machinery against the closed form."""

    flux_error: float
    pressure_error: float
    input_power_error: float
    n_elements: int
    residual: float

    def summary(self) -> str:
        return (f"flux {self.flux_error:+.2%}, surface pressure "
                f"{self.pressure_error:+.2%}, input power "
                f"{self.input_power_error:+.2%} "
                f"({self.n_elements} elements)")


def verify_against_sphere(a: float, f: float, medium: Medium,
                          R_dom: float = DEFAULT_R_DOM,
                          h_boundary: float = 0.1e-6, h_far: float = 0.45e-6,
                          R_eval: float = 100e-6, epsilon: float = 1e-6,
                          bc: str = "curvature",
                          use_cache: bool = True) -> SphereCheck:
    """Solve a uniformly pulsating sphere in the FEM machinery and compare
    flux at ``R_eval``, the maximum surface pressure, and the stress-work
    input power against the closed form at the same amplitude."""
    key = cache.content_key({
        "kind": "sphere-check", "schema": cache.SCHEMA_VERSION,
        "solver": SOLVER_VERSION,
        "a": a, "f": f, "medium": [medium.c, medium.rho,
                                   medium.attenuation.terms],
        "R_dom": R_dom, "h_boundary": h_boundary, "h_far": h_far,
        "R_eval": R_eval, "epsilon": epsilon, "bc": bc,
    })
    if use_cache:
        hit = cache.load("check", key)
        if hit is not None:
            _, meta = hit
            return SphereCheck(**{k: meta[k] for k in (
                "flux_error", "pressure_error", "input_power_error",
                "n_elements", "residual")})

    mesh = sphere_mesh(a, R_dom, h_boundary=h_boundary, h_far=h_far)
    omega = 2 * np.pi * f
    amp = -1j * a * omega * epsilon

    def v_n(r, z):
        return np.full(np.shape(r), amp, dtype=complex)

    sol = solve_helmholtz(mesh, f, medium, ("surface",), v_n, bc=bc)
    pat = sol.flux_pattern(R_eval)
    flux_fem = pat.directional_average()
    p_in_fem, _, _ = face_trace_power(sol, FaceSpec("surface", "sphere", a), v_n)

    ref = SphereRadiator(a, epsilon, f, medium)
    _, flux_ref = sphere_radiated_power(ref, R_eval)
    p_ref, _ = sphere_field_at(ref, a)
    p_in_ref = sphere_input_power(ref)

    check = SphereCheck(
        flux_error=float(flux_fem / flux_ref - 1),
        pressure_error=float(sol.max_abs_pressure() / abs(p_ref) - 1),
        input_power_error=float(p_in_fem / p_in_ref - 1),
        n_elements=mesh.n_elements,
        residual=sol.residual,
    )
    if use_cache:
        cache.store("check", key, {}, check.__dict__)
    return check
