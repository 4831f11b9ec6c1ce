"""Strict parser for the line-oriented run configuration.

Format::

    # comment
    [section]
    key = value

Sections: scenario, params, grid, controls, output, command. Unknown
sections or keys, duplicates and bad values are fatal and reported with the
dotted key and line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Boundary, FluidParams, Formulation, Grid1D, TimeControls, make_grid
from .errors import ConfigError, NSWSUError
from .scenarios import KNOBS

_INT_KNOBS = {"k", "u_k", "pert_k"}
_STR_KNOBS = {"base", "target"}


def _pos(v):
    return v > 0


def _nonneg(v):
    return v >= 0


# section -> key -> (type, predicate or None, message)
SCHEMA = {
    "params": {
        "gamma": (float, lambda v: v > 1, "gamma must be > 1"),
        "a": (float, _pos, "must be > 0"),
        "mu": (float, _pos, "must be > 0"),
        "alpha": (float, _nonneg, "must be >= 0"),
        "delta": (float, _pos, "must be > 0"),
    },
    "grid": {
        "length": (float, _pos, "must be > 0"),
        "cells": (int, lambda v: v >= 4, "must be >= 4"),
        "boundary": (str, lambda v: v in {b.value for b in Boundary}, "must be periodic or extrapolate"),
        "origin": (float, None, ""),
    },
    "controls": {
        "t_end": (float, _nonneg, "must be >= 0"),
        "cfl_advective": (float, lambda v: 0 < v <= 1, "must lie in (0, 1]"),
        "cfl_diffusive": (float, lambda v: 0 < v <= 0.5, "must lie in (0, 0.5]"),
        "density_floor": (float, _nonneg, "must be >= 0"),
        "snapshot_stride": (int, lambda v: v >= 1, "must be >= 1"),
        "max_steps": (int, lambda v: v >= 1, "must be >= 1"),
        "snapshot_dt": (float, _nonneg, "must be >= 0"),
        "face_average": (str, lambda v: v in ("arithmetic", "harmonic"), "must be arithmetic or harmonic"),
    },
    "output": {
        "directory": (str, None, ""),
    },
    "command": {
        "formulation": (str, lambda v: v in {f.value for f in Formulation}, "must be u_form or v_form"),
        "eps": (list, lambda v: all(e >= 0 for e in v), "entries must be >= 0"),
        "target": (str, lambda v: v in ("rho", "u", "both"), "must be rho, u or both"),
        "pert_k": (int, lambda v: v >= 1, "must be >= 1"),
        "levels": (int, lambda v: v >= 2, "must be >= 2"),
        "refinement": (int, lambda v: v in (1, 2, 4, 8), "must be 1, 2, 4 or 8"),
        "tolerance": (float, _nonneg, "must be >= 0"),
        "tolerance_rel": (float, _nonneg, "must be >= 0"),
    },
}

REQUIRED = [
    ("scenario", "kind"),
    ("params", "gamma"), ("params", "a"), ("params", "mu"), ("params", "alpha"),
    ("grid", "length"), ("grid", "cells"),
    ("controls", "t_end"),
]


@dataclass(frozen=True)
class CommandOptions:
    formulation: Formulation = Formulation.V_FORM
    eps: tuple = (0.01,)
    target: str = "u"
    pert_k: int = 2
    levels: int | None = None
    refinement: int = 1
    tolerance: float = 1e-6
    tolerance_rel: float = 0.1


@dataclass(frozen=True)
class RunConfig:
    kind: str
    knobs: dict
    label: str
    params: FluidParams
    grid: Grid1D
    controls: TimeControls
    out_dir: str = "out"
    command: CommandOptions = field(default_factory=CommandOptions)


def _convert(raw, typ, key, line):
    try:
        if typ is int:
            value = float(raw)
            if value != int(value):
                raise ValueError
            return int(value)
        if typ is float:
            return float(raw)
        if typ is list:
            return tuple(float(p) for p in raw.split(",") if p.strip())
        return raw
    except ValueError:
        name = {int: "an integer", float: "a number", list: "a comma-separated list of numbers"}[typ]
        raise ConfigError(f"expected {name}, got '{raw}'", key, line) from None


def _tokenize(text):
    section, seen = None, {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped[0] in "#;":
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError("malformed section header", line=lineno)
            section = stripped[1:-1].strip()
            if section not in SCHEMA and section != "scenario":
                raise ConfigError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got '{stripped}'", line=lineno)
        key, value = (p.strip() for p in stripped.split("=", 1))
        if section is None:
            raise ConfigError("key outside of any [section]", key, lineno)
        dotted = f"{section}.{key}"
        if dotted in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[dotted][1]})", dotted, lineno)
        seen[dotted] = (value, lineno)
    return seen


def parse_config(text: str) -> RunConfig:
    entries = _tokenize(text)
    # unknown keys first: a typo is more useful to report than the key it hides
    for dotted, (_, line) in entries.items():
        section, key = dotted.split(".", 1)
        if section != "scenario" and key not in SCHEMA[section]:
            raise ConfigError(f"unknown key '{dotted}'", dotted, line)
    for section, key in REQUIRED:
        if f"{section}.{key}" not in entries:
            raise ConfigError("required key is missing", f"{section}.{key}")

    values = {}
    knobs = {}
    kind_raw, kind_line = entries["scenario.kind"]
    if kind_raw not in KNOBS:
        raise ConfigError(f"unknown scenario kind '{kind_raw}'", "scenario.kind", kind_line)
    allowed_knobs = set(KNOBS[kind_raw])
    if kind_raw == "perturbed":
        base_raw = entries.get("scenario.base", ("smooth_periodic", None))[0]
        if base_raw not in ("vacuum_bump", "smooth_periodic"):
            raise ConfigError(f"unknown base kind '{base_raw}'", "scenario.base", entries["scenario.base"][1])
        allowed_knobs |= KNOBS[base_raw]

    for dotted, (raw, line) in entries.items():
        section, key = dotted.split(".", 1)
        if section == "scenario":
            if key in ("kind", "label"):
                continue
            if key not in allowed_knobs:
                raise ConfigError(f"unknown key for scenario kind '{kind_raw}'", dotted, line)
            typ = int if key in _INT_KNOBS else str if key in _STR_KNOBS else float
            knobs[key] = _convert(raw, typ, dotted, line)
            continue
        typ, ok, msg = SCHEMA[section][key]
        value = _convert(raw, typ, dotted, line)
        if ok is not None and not ok(value):
            raise ConfigError(f"invalid value '{raw}': {msg}", dotted, line)
        values[dotted] = value

    def get(dotted, default=None):
        return values.get(dotted, default)

    try:
        params = FluidParams(gamma=get("params.gamma"), a=get("params.a"), mu=get("params.mu"),
                             alpha=get("params.alpha"), delta=get("params.delta", 0.1))
        grid = make_grid(get("grid.length"), get("grid.cells"), get("grid.boundary", "periodic"),
                         get("grid.origin", 0.0))
        controls = TimeControls(
            t_end=get("controls.t_end"),
            cfl_advective=get("controls.cfl_advective", 0.45),
            cfl_diffusive=get("controls.cfl_diffusive", 0.25),
            density_floor=get("controls.density_floor", 1e-12),
            snapshot_stride=get("controls.snapshot_stride", 10),
            max_steps=get("controls.max_steps", 10_000_000),
            snapshot_dt=get("controls.snapshot_dt", 0.0),
            face_average=get("controls.face_average", "arithmetic"),
        )
        command = CommandOptions(
            formulation=Formulation(get("command.formulation", "v_form")),
            eps=get("command.eps", (0.01,)),
            target=get("command.target", "u"),
            pert_k=get("command.pert_k", 2),
            levels=get("command.levels"),
            refinement=get("command.refinement", 1),
            tolerance=get("command.tolerance", 1e-6),
            tolerance_rel=get("command.tolerance_rel", 0.1),
        )
    except NSWSUError as exc:
        raise ConfigError(str(exc)) from exc

    label = entries.get("scenario.label", (kind_raw, None))[0]
    return RunConfig(kind_raw, knobs, label, params, grid, controls,
                     get("output.directory", "out"), command)
