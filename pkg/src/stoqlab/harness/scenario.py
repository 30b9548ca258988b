"""Scenario configuration: flat key/value text with sectioned headers.

A scenario names the engines it runs, the constants and fields, the
initial state, per-engine numerical parameters, and a list of checks.
Each check is a `[check:NAME]` section whose `kind` selects a registered
evaluation; every tolerance lives here, not in code, so refinement
studies are config-only.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..model import FieldSpec, PhysicalConstants


class ScenarioError(ValueError):
    """Configuration file invalid; message names the offending field."""


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


@dataclass
class CheckSpec:
    name: str
    kind: str
    params: dict


@dataclass
class Scenario:
    name: str
    engines: tuple
    seed: int
    consts: PhysicalConstants
    fields: FieldSpec
    initial: dict
    engine_params: dict  # section name -> dict of raw strings
    checks: list
    source: str = ""

    def check_param(self, check, key, default=None, kind=float):
        raw = check.params.get(key)
        if raw is None:
            if default is None:
                raise ScenarioError(
                    f"check {check.name!r} is missing parameter {key!r}")
            return default
        if kind is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        try:
            return kind(raw)
        except ValueError as exc:
            raise ScenarioError(
                f"check {check.name!r} parameter {key!r}: {exc}") from exc


_VALID_ENGINES = ("sde", "fpe", "qsolver", "symbolic")


def build_constants(section):
    kwargs = {}
    for key in ("hbar", "mass", "charge", "light_speed", "vacuum_power"):
        if key in section:
            try:
                kwargs[key] = float(section[key])
            except ValueError as exc:
                raise ScenarioError(f"constant {key!r}: {exc}") from exc
    try:
        return PhysicalConstants(**kwargs)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def build_fields(section, consts):
    preset = section.get("preset", "free").strip()
    dim = int(section.get("dim", "1"))
    if preset == "free":
        return FieldSpec.free(dim)
    if preset == "harmonic":
        omega = _floats(section.get("omega", "1.0"))
        omega = omega[0] if len(omega) == 1 else omega
        return FieldSpec.harmonic(omega, dim=dim, mass=consts.mass)
    if preset == "uniform_magnetic":
        b = _floats(section.get("b_field", "0 0 1"))
        return FieldSpec.uniform_magnetic(b if dim == 3 else b[0], dim=dim)
    if preset == "plane_wave_a":
        return FieldSpec.plane_wave_a(
            float(section.get("amplitude", "1.0")),
            _floats(section.get("wave_vector", "1")),
            float(section.get("frequency", "1.0")),
            _floats(section.get("polarization", "1")),
            dim=dim)
    if preset == "linear":
        force = _floats(section.get("force", "1.0"))
        force = force[0] if len(force) == 1 else force
        return FieldSpec.linear(force, dim=dim)
    raise ScenarioError(
        f"unknown field preset {preset!r}; valid presets: "
        "free, harmonic, uniform_magnetic, plane_wave_a, linear")


def load_scenario(path):
    """Parse and validate a scenario file."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ScenarioError(f"parse error in {path}: {exc}") from exc

    if "scenario" not in parser:
        raise ScenarioError(f"{path}: missing [scenario] section")
    meta = parser["scenario"]
    name = meta.get("name", path.stem)
    engines = tuple(e.strip() for e in meta.get("engines", "").split(",")
                    if e.strip())
    for engine in engines:
        if engine not in _VALID_ENGINES:
            raise ScenarioError(
                f"unknown engine {engine!r}; valid engines: {_VALID_ENGINES}")
    try:
        seed = int(meta.get("seed", "1"))
    except ValueError as exc:
        raise ScenarioError(f"seed: {exc}") from exc
    if seed < 0:
        raise ScenarioError("seed must be nonnegative")

    consts = build_constants(parser["constants"] if "constants" in parser else {})
    fields = build_fields(parser["fields"] if "fields" in parser else {}, consts)

    initial = {}
    if "initial" in parser:
        for key, raw in parser["initial"].items():
            vals = _floats(raw)
            if not all(np.isfinite(vals)):
                raise ScenarioError(f"initial {key!r} must be finite")
            initial[key] = vals[0] if len(vals) == 1 else np.array(vals)
    for key in ("sigma_x", "sigma_p"):
        if key in initial and np.any(np.asarray(initial[key]) <= 0):
            raise ScenarioError(f"initial {key!r} must be positive")

    engine_params = {}
    checks = []
    for section in parser.sections():
        if section.startswith("check:"):
            body = dict(parser[section])
            kind = body.pop("kind", None)
            if kind is None:
                raise ScenarioError(f"[{section}] is missing 'kind'")
            checks.append(CheckSpec(section[len("check:"):], kind, body))
        elif section in ("sde", "fpe", "qsolver"):
            engine_params[section] = dict(parser[section])

    return Scenario(name=name, engines=engines, seed=seed, consts=consts,
                    fields=fields, initial=initial,
                    engine_params=engine_params, checks=checks,
                    source=str(path))


def builtin_scenario_dir():
    return Path(__file__).parent / "scenarios"


def list_builtin_scenarios():
    return sorted(p.stem for p in builtin_scenario_dir().glob("*.cfg"))


def resolve_scenario(name_or_path):
    """Accept either a path to a .cfg or a builtin scenario name."""
    p = Path(name_or_path)
    if p.exists():
        return load_scenario(p)
    builtin = builtin_scenario_dir() / f"{name_or_path}.cfg"
    if builtin.exists():
        return load_scenario(builtin)
    raise ScenarioError(
        f"no scenario {name_or_path!r}; builtins: {list_builtin_scenarios()}")
