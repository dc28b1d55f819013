"""Shared fixtures: media presets and session-scoped FEM artifacts.

The heavy FEM solves (default ringset mesh, the six calibrated solutions,
the traveling-phase patterns and the sphere-oracle checks) are computed
once per session and shared between the unit tests and the acceptance
suite.  The disk cache is redirected to a session tmpdir so runs are
hermetic.
"""

import os

import pytest

from microsonic import cache
from microsonic.medium import Medium
from microsonic import ringset as rs


@pytest.fixture(scope="session", autouse=True)
def _session_cache(tmp_path_factory):
    path = tmp_path_factory.mktemp("fem-cache")
    old = os.environ.get(cache.ENV_VAR)
    os.environ[cache.ENV_VAR] = str(path)
    yield path
    if old is None:
        os.environ.pop(cache.ENV_VAR, None)
    else:
        os.environ[cache.ENV_VAR] = old


@pytest.fixture(scope="session")
def water():
    return Medium.preset("water")


@pytest.fixture(scope="session")
def low():
    return Medium.preset("low")


@pytest.fixture(scope="session")
def high():
    return Medium.preset("high")


@pytest.fixture(scope="session")
def default_geom():
    return rs.RingsetGeometry()


@pytest.fixture(scope="session")
def ringset_mesh_default(default_geom):
    return rs.build_mesh(default_geom)


@pytest.fixture(scope="session")
def table5_solutions(ringset_mesh_default, default_geom):
    """(medium name, f_MHz) -> (solution, pattern at 100 um), at 100 pW."""
    act = rs.SurfaceActuation()
    out = {}
    for name in ("water", "low", "high"):
        medium = Medium.preset(name)
        for f_mhz in (10.0, 100.0):
            sol = rs.solve(ringset_mesh_default, act, f_mhz * 1e6, medium,
                           P_target=100e-12, geom=default_geom)
            out[(name, f_mhz)] = (sol, rs.flux_pattern(sol, 100e-6))
    return out


@pytest.fixture(scope="session")
def traveling_100(low, default_geom):
    return rs.traveling_phase_pattern(geom=default_geom, f=100e6, medium=low)


@pytest.fixture(scope="session")
def traveling_10(low, default_geom, ringset_mesh_default):
    act = rs.SurfaceActuation(surface="outer", phase="traveling")
    sol = rs.solve(ringset_mesh_default, act, 10e6, low, P_target=100e-12,
                   geom=default_geom)
    return rs.flux_pattern(sol, 100e-6)


@pytest.fixture(scope="session")
def sphere_checks(low):
    """Oracle comparison of the FEM machinery at 10 and 100 MHz."""
    return {f: rs.verify_against_sphere(5e-6, f, low) for f in (10e6, 100e6)}
