"""Command-line front end.

Every physical flag takes a unit-suffixed value (``--radius 5um``,
``--frequency 100MHz``).  Exit codes: 0 success, 1 validation error,
2 numerical failure, 3 safety failure (with ``--enforce-safety``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .medium import Medium, ATTENUATION_PRESETS
from .scenario import ResultSet, ScenarioError, Stopwatch, load_scenario
from .units import UM, MHZ, PW, UnitError, parse_quantity
from . import comms, directivity, safety, sphere
from . import ringset as rs

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_SAFETY = 3


class CliError(Exception):
    def __init__(self, message, code=EXIT_VALIDATION):
        super().__init__(message)
        self.code = code


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message)


def _qty(dimension):
    def convert(text):
        try:
            return parse_quantity(text, dimension)
        except UnitError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return convert


def _medium_arg(p):
    p.add_argument("--medium", default="low",
                   help="medium preset: water | low | high")


def _out_arg(p):
    p.add_argument("--out", default=None,
                   help="directory for CSV/JSON output (default: print JSON)")


def _get_medium(args) -> Medium:
    if args.medium not in ATTENUATION_PRESETS:
        raise CliError(f"unknown medium preset {args.medium!r}")
    return Medium.preset(args.medium)


def _emit(result: ResultSet, args) -> None:
    if getattr(args, "out", None):
        path = result.write(args.out)
        print(path)
    else:
        print(json.dumps(result.to_json_dict(), indent=2))


def build_parser() -> Parser:
    p = Parser(prog="microsonic",
               description="Ultrasonic communication between micron-scale "
                           "radiators: fields, beams, budgets, safety.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", metavar="command")

    sp = sub.add_parser("sphere", parents=[], help="pulsating-sphere powers")
    sp.add_argument("--radius", type=_qty("length"), required=True)
    sp.add_argument("--frequency", type=_qty("frequency"), required=True)
    sp.add_argument("--power", type=_qty("power"), default=100 * PW)
    sp.add_argument("--distance", type=_qty("length"), default=100 * UM)
    _medium_arg(sp)
    _out_arg(sp)

    rp = sub.add_parser("ringset", help="FEM ringset solve and pattern")
    rp.add_argument("--frequency", type=_qty("frequency"), required=True)
    rp.add_argument("--power", type=_qty("power"), default=100 * PW)
    rp.add_argument("--surface", default="outer",
                    choices=["outer", "inner", "ends"])
    rp.add_argument("--phase", default="uniform",
                    choices=["uniform", "traveling"])
    rp.add_argument("--distance", type=_qty("length"), default=100 * UM)
    rp.add_argument("--no-cache", action="store_true")
    _medium_arg(rp)
    _out_arg(rp)

    bp = sub.add_parser("beam", help="directed-beam mode optimization")
    bp.add_argument("--radius", type=_qty("length"), required=True)
    bp.add_argument("--frequency", type=_qty("frequency"), required=True)
    bp.add_argument("--power", type=_qty("power"), default=100 * PW)
    bp.add_argument("--distance", type=_qty("length"), default=100 * UM)
    _medium_arg(bp)
    _out_arg(bp)

    dp = sub.add_parser("disk", help="baffled-disk directivity")
    dp.add_argument("--diameter", type=_qty("length"), required=True)
    dp.add_argument("--wavelength", type=_qty("length"), required=True)
    _out_arg(dp)

    lp = sub.add_parser("link", help="single link budget")
    lp.add_argument("--radius", type=_qty("length"), default=5 * UM)
    lp.add_argument("--frequency", type=_qty("frequency"), required=True)
    lp.add_argument("--power", type=_qty("power"), default=100 * PW)
    lp.add_argument("--distance", type=_qty("length"), required=True)
    lp.add_argument("--area", type=_qty("area"), default=1e-12)
    lp.add_argument("--bandwidth", type=_qty("frequency"), default=200e3)
    lp.add_argument("--flux", type=_qty("flux"), default=None,
                    help="bypass the radiator model with a given flux")
    lp.add_argument("--directed", action="store_true")
    _medium_arg(lp)
    _out_arg(lp)

    rl = sub.add_parser("relay", help="multi-hop relay chain")
    rl.add_argument("--hops", type=int, default=10)
    rl.add_argument("--hop-length", type=_qty("length"), default=100 * UM)
    rl.add_argument("--node-power", type=_qty("power"), default=10 * PW)
    rl.add_argument("--frequency", type=_qty("frequency"), default=350 * MHZ)
    rl.add_argument("--radius", type=_qty("length"), default=5 * UM)
    rl.add_argument("--area", type=_qty("area"), default=1e-12)
    rl.add_argument("--bandwidth", type=_qty("frequency"), default=200e3)
    _medium_arg(rl)
    _out_arg(rl)

    dr = sub.add_parser("drift", help="minimum detectable positional drift")
    dr.add_argument("--frequency", type=_qty("frequency"), default=100 * MHZ)
    dr.add_argument("--power", type=_qty("power"), default=100 * PW)
    dr.add_argument("--distance", type=_qty("length"), default=100 * UM)
    dr.add_argument("--area", type=_qty("area"), default=1e-12)
    dr.add_argument("--integration-time", type=_qty("time"), default=1e-3)
    dr.add_argument("--snr", type=float, default=2.0)
    dr.add_argument("--no-cache", action="store_true")
    _medium_arg(dr)
    _out_arg(dr)

    sf = sub.add_parser("safety", help="safety-envelope report")
    sf.add_argument("--flux", type=_qty("flux"), required=True,
                    help="peak flux, e.g. 1e3pW/um2 (numerically W/m2)")
    sf.add_argument("--pressure", type=_qty("pressure"), required=True)
    sf.add_argument("--enforce-safety", action="store_true")
    _out_arg(sf)

    rr = sub.add_parser("reproduce", help="rebuild a bundled table/figure")
    rr.add_argument("target", choices=[
        "table3", "table5", "fig-attenuation", "fig-efficiency",
        "fig-disk", "fig-directed", "fig-ringset-pattern"])
    rr.add_argument("--no-cache", action="store_true")
    _out_arg(rr)

    rn = sub.add_parser("run", help="run a scenario configuration file")
    rn.add_argument("scenario", help="path to a scenario file")
    rn.add_argument("--enforce-safety", action="store_true")
    _out_arg(rn)

    return p


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def cmd_sphere(args) -> ResultSet:
    medium = _get_medium(args)
    res = ResultSet(columns=["radius_um", "f_MHz", "input_power_pW",
                             "radiated_power_pW", "flux_pW_per_um2",
                             "max_pressure_Pa", "acoustic_eff",
                             "transmission_eff", "overall_eff"],
                    name="sphere")
    s = sphere.calibrated_sphere(args.radius, args.frequency, medium, args.power)
    rep = sphere.power_report(s, args.distance)
    res.add(radius_um=args.radius / UM, f_MHz=args.frequency / MHZ,
            input_power_pW=rep.input_power / PW,
            radiated_power_pW=rep.radiated_power / PW,
            flux_pW_per_um2=rep.flux,
            max_pressure_Pa=rep.max_pressure,
            acoustic_eff=rep.acoustic_efficiency,
            transmission_eff=rep.transmission_efficiency,
            overall_eff=rep.overall_efficiency)
    return res


def cmd_ringset(args) -> ResultSet:
    medium = _get_medium(args)
    geom = rs.RingsetGeometry()
    mesh = rs.build_mesh(geom, f=args.frequency, use_cache=not args.no_cache)
    act = rs.SurfaceActuation(surface=args.surface, phase=args.phase)
    sol = rs.solve(mesh, act, args.frequency, medium, P_target=args.power,
                   geom=geom, use_cache=not args.no_cache)
    pat = rs.flux_pattern(sol, args.distance)
    res = ResultSet(columns=["theta_deg", "flux_pW_per_um2"],
                    name="ringset-pattern")
    for th, fl in zip(pat.theta, pat.flux):
        res.add(theta_deg=np.degrees(th), flux_pW_per_um2=fl)
    return res


def cmd_beam(args) -> ResultSet:
    medium = _get_medium(args)
    beam = directivity.optimize_directed_beam(
        args.radius, args.frequency, medium, args.power, args.distance)
    res = ResultSet(columns=["f_MHz", "uniform_flux_pW_per_um2",
                             "directed_flux_pW_per_um2", "enhancement",
                             "modes_used"], name="beam")
    res.add(f_MHz=args.frequency / MHZ, uniform_flux_pW_per_um2=beam.uniform_flux,
            directed_flux_pW_per_um2=beam.flux, enhancement=beam.enhancement,
            modes_used=beam.lmax_used)
    return res


def cmd_disk(args) -> ResultSet:
    theta = directivity.disk_null_angle(args.diameter, args.wavelength)
    gain = directivity.disk_gain(args.diameter, args.wavelength)
    res = ResultSet(columns=["lambda_over_d", "null_angle_deg", "gain"],
                    name="disk")
    res.add(lambda_over_d=args.wavelength / args.diameter,
            null_angle_deg=np.degrees(theta) if theta is not None else float("nan"),
            gain=gain)
    return res


def cmd_link(args) -> ResultSet:
    medium = _get_medium(args)
    receiver = comms.Receiver(area=args.area, bandwidth=args.bandwidth)
    if args.flux is not None:
        budget = comms.budget_from_flux(args.flux, args.power, args.distance,
                                        receiver, medium)
    else:
        cls = (comms.DirectedSphereTransmitter if args.directed
               else comms.UniformSphereTransmitter)
        tx = cls(args.radius, args.frequency, medium, args.power)
        budget = comms.evaluate_link(tx, args.distance, 0.0, receiver)
    res = ResultSet(columns=list(budget.to_json_dict()), name="link")
    res.add(**budget.to_json_dict())
    return res


def cmd_relay(args) -> ResultSet:
    medium = _get_medium(args)
    chain = comms.uniform_relay_chain(args.hops, args.hop_length,
                                      args.node_power, args.frequency, medium,
                                      radius=args.radius,
                                      bandwidth=args.bandwidth)
    receiver = comms.Receiver(area=args.area, bandwidth=args.bandwidth)
    report = comms.evaluate_relay(chain, receiver)
    res = ResultSet(columns=["hop", "p_signal_pW", "capacity_bps",
                             "wideband_limit_bps", "latency_s"], name="relay")
    for i, h in enumerate(report.hops):
        res.add(hop=i, p_signal_pW=h.p_signal / PW, capacity_bps=h.capacity,
                wideband_limit_bps=h.wideband_limit, latency_s=h.latency)
    res.add(hop=-1, p_signal_pW=float("nan"),
            capacity_bps=report.end_to_end_rate,
            wideband_limit_bps=report.end_to_end_wideband,
            latency_s=report.latency)
    return res


def cmd_drift(args) -> ResultSet:
    medium = _get_medium(args)
    rep = rs.traveling_phase_pattern(f=args.frequency, medium=medium,
                                     P_target=args.power, R_eval=args.distance,
                                     use_cache=not args.no_cache)
    energy = comms.threshold_energy(310.0, args.snr)
    drift = comms.min_detectable_drift(rep.pattern, args.area,
                                       args.integration_time, energy)
    res = ResultSet(columns=["dtheta_rad", "dx_um", "detectable"], name="drift")
    if drift is None:
        res.add(dtheta_rad=float("nan"), dx_um=float("nan"), detectable=False)
    else:
        res.add(dtheta_rad=drift[0], dx_um=drift[1] / UM, detectable=True)
    return res


def cmd_safety(args):
    report = safety.check_scenario(args.flux, args.pressure)
    res = ResultSet(columns=["check", "value", "limit", "status"], name="safety")
    for c in report.checks:
        res.add(check=c.name, value=c.value, limit=c.limit,
                status=("informational" if c.informational
                        else "pass" if c.passed else "fail"))
    return res, report


def cmd_reproduce(args) -> ResultSet:
    use_cache = not args.no_cache
    target = args.target
    low = Medium.preset("low")
    if target == "table3":
        res = ResultSet(columns=["radius_um", "f_MHz", "radiated_power_pW",
                                 "flux_pW_per_um2", "max_pressure_Pa"],
                        name="table3")
        for a_um in (0.5, 5.0, 50.0):
            for f_mhz in (10.0, 100.0):
                s = sphere.calibrated_sphere(a_um * UM, f_mhz * MHZ, low, 100 * PW)
                rep = sphere.power_report(s, 100 * UM)
                res.add(radius_um=a_um, f_MHz=f_mhz,
                        radiated_power_pW=rep.radiated_power / PW,
                        flux_pW_per_um2=rep.flux,
                        max_pressure_Pa=rep.max_pressure)
        return res
    if target == "fig-attenuation":
        res = ResultSet(columns=["f_MHz", "alpha_water_per_m", "alpha_low_per_m",
                                 "alpha_high_per_m"], name="fig-attenuation")
        for f in np.geomspace(1.0, 1000.0, 121):
            res.add(f_MHz=f,
                    alpha_water_per_m=ATTENUATION_PRESETS["water"].alpha(f * MHZ),
                    alpha_low_per_m=ATTENUATION_PRESETS["low"].alpha(f * MHZ),
                    alpha_high_per_m=ATTENUATION_PRESETS["high"].alpha(f * MHZ))
        return res
    if target == "fig-efficiency":
        res = ResultSet(columns=["radius_um", "medium", "f_MHz", "acoustic_eff",
                                 "transmission_eff", "overall_eff"],
                        name="fig-efficiency")
        for a_um in (0.5, 5.0, 50.0):
            for name in ("water", "low", "high"):
                med = Medium.preset(name)
                for f in np.geomspace(1.0, 1000.0, 61):
                    eff = sphere.efficiency(a_um * UM, f * MHZ, med, 100 * UM)
                    res.add(radius_um=a_um, medium=name, f_MHz=f,
                            acoustic_eff=eff.acoustic,
                            transmission_eff=eff.transmission,
                            overall_eff=eff.overall)
        return res
    if target == "fig-disk":
        res = ResultSet(columns=["lambda_over_d", "gain"], name="fig-disk")
        for lod in np.geomspace(0.03, 30.0, 81):
            res.add(lambda_over_d=lod, gain=directivity.disk_gain(1.0, lod))
        return res
    if target == "fig-directed":
        res = ResultSet(columns=["f_MHz", "uniform_flux_pW_per_um2",
                                 "directed_flux_pW_per_um2", "enhancement"],
                        name="fig-directed")
        for f in np.geomspace(10.0, 1000.0, 41):
            beam = directivity.optimize_directed_beam(
                5 * UM, f * MHZ, low, 100 * PW, 100 * UM)
            res.add(f_MHz=f, uniform_flux_pW_per_um2=beam.uniform_flux,
                    directed_flux_pW_per_um2=beam.flux,
                    enhancement=beam.enhancement)
        return res
    if target == "table5":
        res = ResultSet(columns=["medium", "f_MHz", "radiated_power_pW",
                                 "flux_pW_per_um2", "max_pressure_Pa"],
                        name="table5")
        geom = rs.RingsetGeometry()
        act = rs.SurfaceActuation()
        for name in ("water", "low", "high"):
            med = Medium.preset(name)
            for f_mhz in (10.0, 100.0):
                mesh = rs.build_mesh(geom, f=f_mhz * MHZ, use_cache=use_cache)
                sol = rs.solve(mesh, act, f_mhz * MHZ, med, P_target=100 * PW,
                               geom=geom, use_cache=use_cache)
                pat = rs.flux_pattern(sol, 100 * UM)
                res.add(medium=name, f_MHz=f_mhz,
                        radiated_power_pW=pat.total_power() / PW,
                        flux_pW_per_um2=pat.directional_average(),
                        max_pressure_Pa=sol.max_abs_pressure())
        return res
    if target == "fig-ringset-pattern":
        res = ResultSet(columns=["f_MHz", "theta_deg", "flux_pW_per_um2"],
                        name="fig-ringset-pattern")
        geom = rs.RingsetGeometry()
        act = rs.SurfaceActuation()
        for f_mhz in (10.0, 100.0):
            mesh = rs.build_mesh(geom, f=f_mhz * MHZ, use_cache=use_cache)
            sol = rs.solve(mesh, act, f_mhz * MHZ, low, P_target=100 * PW,
                           geom=geom, use_cache=use_cache)
            pat = rs.flux_pattern(sol, 100 * UM)
            for th, fl in zip(pat.theta, pat.flux):
                res.add(f_MHz=f_mhz, theta_deg=np.degrees(th),
                        flux_pW_per_um2=fl)
        return res
    raise CliError(f"unknown reproduce target {target!r}")


def cmd_run(args):
    try:
        scn = load_scenario(args.scenario)
    except FileNotFoundError:
        raise CliError(f"scenario file not found: {args.scenario}")
    medium = scn.medium()
    kind = scn.get("radiator", "kind", "sphere")
    power = scn.get("radiator", "power", 100 * PW)
    distance = scn.get("evaluate", "distance", 100 * UM)
    radii = scn.sweeps.get("radius") or [scn.require("radiator", "radius")]
    freqs = scn.sweeps.get("frequency") or [scn.require("radiator", "frequency")]
    if kind == "sphere":
        res = ResultSet(columns=["radius_um", "f_MHz", "radiated_power_pW",
                                 "flux_pW_per_um2", "max_pressure_Pa"],
                        name=scn.name, config_hash=scn.config_hash())
        for a in radii:
            for f in freqs:
                s = sphere.calibrated_sphere(a, f, medium, power)
                rep = sphere.power_report(s, distance)
                res.add(radius_um=a / UM, f_MHz=f / MHZ,
                        radiated_power_pW=rep.radiated_power / PW,
                        flux_pW_per_um2=rep.flux,
                        max_pressure_Pa=rep.max_pressure)
        res.sort()
        return res, None
    if kind == "disk":
        diameters = scn.sweeps.get("diameter") or [scn.require("radiator", "diameter")]
        res = ResultSet(columns=["diameter_um", "f_MHz", "null_angle_deg", "gain"],
                        name=scn.name, config_hash=scn.config_hash())
        for d in diameters:
            for f in freqs:
                lam = medium.c / f
                th = directivity.disk_null_angle(d, lam)
                res.add(diameter_um=d / UM, f_MHz=f / MHZ,
                        null_angle_deg=(np.degrees(th) if th is not None
                                        else float("nan")),
                        gain=directivity.disk_gain(d, lam))
        res.sort()
        return res, None
    if kind == "ringset":
        geom = rs.RingsetGeometry(
            length=scn.get("radiator", "length", 10 * UM),
            R_outer=scn.get("radiator", "r_outer", 4 * UM),
            R_inner=scn.get("radiator", "r_inner", 3 * UM))
        act = rs.SurfaceActuation(
            surface=scn.get("actuation", "surface", "outer"),
            phase=scn.get("actuation", "phase", "uniform"))
        res = ResultSet(columns=["f_MHz", "radiated_power_pW",
                                 "flux_pW_per_um2", "max_pressure_Pa"],
                        name=scn.name, config_hash=scn.config_hash())
        max_pressure = max_flux = 0.0
        for f in freqs:
            mesh = rs.build_mesh(geom, f=f)
            sol = rs.solve(mesh, act, f, medium, P_target=power, geom=geom)
            pat = rs.flux_pattern(sol, distance)
            res.add(f_MHz=f / MHZ, radiated_power_pW=pat.total_power() / PW,
                    flux_pW_per_um2=pat.directional_average(),
                    max_pressure_Pa=sol.max_abs_pressure())
            max_pressure = max(max_pressure, sol.max_abs_pressure())
        res.sort()
        return res, None
    raise ScenarioError(f"[radiator] unknown kind {kind!r}")


def _dispatch(args):
    """Run one subcommand; returns (ResultSet, exit_code)."""
    if args.command == "sphere":
        return cmd_sphere(args), EXIT_OK
    if args.command == "ringset":
        return cmd_ringset(args), EXIT_OK
    if args.command == "beam":
        return cmd_beam(args), EXIT_OK
    if args.command == "disk":
        return cmd_disk(args), EXIT_OK
    if args.command == "link":
        return cmd_link(args), EXIT_OK
    if args.command == "relay":
        return cmd_relay(args), EXIT_OK
    if args.command == "drift":
        return cmd_drift(args), EXIT_OK
    if args.command == "reproduce":
        return cmd_reproduce(args), EXIT_OK
    if args.command == "safety":
        result, report = cmd_safety(args)
        code = (EXIT_SAFETY if args.enforce_safety and not report.passed
                else EXIT_OK)
        return result, code
    if args.command == "run":
        result, report = cmd_run(args)
        code = EXIT_OK
        if getattr(args, "enforce_safety", False) and report is not None \
                and not report.passed:
            code = EXIT_SAFETY
        return result, code
    raise CliError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.command is None:
        parser.print_help()
        return EXIT_VALIDATION
    try:
        with Stopwatch() as watch:
            result, code = _dispatch(args)
        result.runtime_s = watch.elapsed
        _emit(result, args)
        return code
    except (CliError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
