"""Scenario configuration files, sweeps and deterministic result tables.

Scenarios are INI-style key-value files with explicit unit suffixes on
every physical quantity (``radius = 5um``, ``frequency = 10MHz``); bare
numbers in physical fields are rejected.  Example::

    [scenario]
    name = sphere-table

    [medium]
    preset = low

    [radiator]
    kind = sphere
    power = 100pW

    [sweep]
    radius = 0.5um, 5um, 50um
    frequency = 10MHz, 100MHz

    [evaluate]
    distance = 100um

Results are tabular; CSV output uses scientific notation with 9
significant digits, so identical scenarios produce byte-identical files.
JSON reports mirror the CSV rows and add metadata.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .medium import ATTENUATION_PRESETS, AttenuationModel, Medium
from .units import UnitError, parse_quantity


class ScenarioError(ValueError):
    """Configuration problem, reported with section/field context."""


_DIMENSIONS = {
    "radius": "length", "diameter": "length", "distance": "length",
    "wavelength": "length", "length": "length", "r_outer": "length",
    "r_inner": "length", "taper": "length", "domain_radius": "length",
    "comm_radius": "length", "hop_length": "length",
    "frequency": "frequency", "bandwidth": "frequency",
    "power": "power", "node_power": "power",
    "area": "area",
    "temperature": "temperature",
    "integration_time": "time",
    "flow_speed": "speed",
    "energy": "energy",
    "epsilon": "dimensionless", "snr": "dimensionless",
    "robot_count": "dimensionless", "hops": "dimensionless",
}


def parse_field(section: str, key: str, raw: str):
    dim = _DIMENSIONS.get(key)
    if dim is None:
        return raw.strip()
    try:
        return parse_quantity(raw.strip(), dim)
    except UnitError as exc:
        raise ScenarioError(f"[{section}] {key}: {exc}") from exc


def parse_list(section: str, key: str, raw: str):
    return [parse_field(section, key, item) for item in raw.split(",") if item.strip()]


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario: sections of unit-checked values plus sweep axes."""

    name: str
    sections: dict
    sweeps: dict          # key -> list of SI values
    source_text: str

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        val = self.get(section, key)
        if val is None:
            raise ScenarioError(f"missing required field [{section}] {key}")
        return val

    def medium(self) -> Medium:
        sec = self.sections.get("medium", {})
        preset = sec.get("preset", "low")
        if preset == "custom":
            terms_raw = sec.get("attenuation_terms")
            if terms_raw is None:
                raise ScenarioError(
                    "[medium] custom preset needs attenuation_terms = a1:p1, a2:p2")
            terms = []
            for chunk in terms_raw.split(","):
                try:
                    a, p = chunk.split(":")
                    terms.append((float(a), float(p)))
                except ValueError as exc:
                    raise ScenarioError(
                        f"[medium] bad attenuation term {chunk!r}") from exc
            return Medium(attenuation=AttenuationModel(tuple(terms)), name="custom")
        if preset not in ATTENUATION_PRESETS:
            raise ScenarioError(f"[medium] unknown preset {preset!r}")
        return Medium.preset(preset)

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def canonical(self) -> str:
        payload = {"name": self.name, "sections": self.sections,
                   "sweeps": self.sweeps}
        return json.dumps(payload, sort_keys=True, default=str)


def parse_scenario(text: str) -> Scenario:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ScenarioError(f"cannot parse scenario file: {exc}") from exc
    sections = {}
    sweeps = {}
    for section in cp.sections():
        sections[section] = {}
        for key, raw in cp[section].items():
            if section == "sweep":
                values = parse_list(section, key, raw)
                if not values:
                    raise ScenarioError(f"[sweep] {key}: empty sweep list")
                sweeps[key] = values
            elif "," in raw and _DIMENSIONS.get(key) is not None:
                sections[section][key] = parse_list(section, key, raw)
            else:
                sections[section][key] = parse_field(section, key, raw)
    name = sections.get("scenario", {}).get("name", "unnamed")
    return Scenario(name=name, sections=sections, sweeps=sweeps,
                    source_text=text)


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


# ---------------------------------------------------------------------------
# result tables
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.8e}"
    return str(value)


@dataclass
class ResultSet:
    """Tabular records keyed by sweep coordinates, with run metadata."""

    columns: list
    rows: list = field(default_factory=list)
    name: str = "results"
    config_hash: str = ""
    runtime_s: float = 0.0

    def add(self, **record):
        self.rows.append([record[c] for c in self.columns])

    def sort(self):
        self.rows.sort(key=lambda row: tuple(_fmt(v) for v in row))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        return {
            "metadata": {
                "name": self.name,
                "tool_version": __version__,
                "config_hash": self.config_hash,
                "runtime_s": round(self.runtime_s, 3),
            },
            "columns": self.columns,
            "rows": [[_fmt(v) for v in row] for row in self.rows],
        }

    def write(self, out_dir, stem: Optional[str] = None):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.name
        csv_path = out / f"{stem}.csv"
        csv_path.write_text(self.to_csv())
        (out / f"{stem}.json").write_text(
            json.dumps(self.to_json_dict(), indent=2) + "\n")
        return csv_path


class Stopwatch:
    def __enter__(self):
        self.t0 = time.time()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.time() - self.t0
        return False
