"""Scenario documents, initial conditions and built-in presets.

A scenario document is TOML restricted to eight sections (``domain``,
``diffusion``, ``ignition``, ``kernel``, ``wind``, ``pyro``, ``initial``,
``run``).  Keys may be written dotted (``wind.omega = [-1, 0.4]``), as inline
tables (``kernel = { type = "bump", radius = 0.02, mass = 10 }``) or under
``[section]`` headers.  Unknown sections or keys are errors.  Every omitted key
takes its default; the defaults describe a nondimensional unit square with
``c = 1e-3``, ignition temperature 1, no wind and no pyrogenic flow.
"""
from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import tomli

from .combustion import (ConstantTheta, FuelMemory, FuelState, InteractionKernel,
                         build_dirac_kernel, single_cell_kernel)
from .errors import InvalidScenarioError, ScenarioParseError
from .grid import BoundaryCondition, Grid
from .solver import Scenario, SolverConfig
from .wind import ConstantWind, PyrogenicModel, TableWind


# ---------------------------------------------------------------- validators

def _real(lo=-math.inf, hi=math.inf, lo_open=False, hi_open=False, finite=True):
    def check(key, v):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidScenarioError(f"{key} must be a number, got {v!r}")
        v = float(v)
        if finite and not math.isfinite(v):
            raise InvalidScenarioError(f"{key} must be finite, got {v}")
        if v < lo or (lo_open and v == lo) or v > hi or (hi_open and v == hi):
            lb = "(" if lo_open else "["
            ub = ")" if hi_open else "]"
            raise InvalidScenarioError(f"{key} must lie in {lb}{lo}, {hi}{ub}, got {v}")
        return v
    return check


def _int(lo):
    def check(key, v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise InvalidScenarioError(f"{key} must be an integer, got {v!r}")
        if v < lo:
            raise InvalidScenarioError(f"{key} must be at least {lo}, got {v}")
        return v
    return check


def _bool(key, v):
    if not isinstance(v, bool):
        raise InvalidScenarioError(f"{key} must be true or false, got {v!r}")
    return v


def _str(key, v):
    if not isinstance(v, str):
        raise InvalidScenarioError(f"{key} must be a string, got {v!r}")
    return v


def _choice(*options):
    def check(key, v):
        if v not in options:
            raise InvalidScenarioError(f"{key} must be one of {', '.join(options)}; got {v!r}")
        return v
    return check


def _rows(width, item=_real()):
    def check(key, v):
        if not isinstance(v, list):
            raise InvalidScenarioError(f"{key} must be an array, got {v!r}")
        out = []
        for k, row in enumerate(v):
            if not isinstance(row, list) or len(row) != width:
                raise InvalidScenarioError(f"{key}[{k}] must be an array of {width} numbers")
            out.append([item(f"{key}[{k}]", x) for x in row])
        return out
    return check


def _vec2(item=_real()):
    rows = _rows(2, item)
    return lambda key, v: rows(key, [v])[0]


_POS = _real(0.0, lo_open=True)
_NONNEG = _real(0.0)

# section -> key -> (default, validator, documentation)
SCHEMA = {
    "domain": {
        "nx": (100, _int(3), "cell count along x"),
        "ny": (100, _int(3), "cell count along y"),
        "size": ([1.0, 1.0], _vec2(_POS), "domain width and height [length]"),
        "boundary_value": (0.0, _real(), "Dirichlet temperature on the outer ring [temperature]"),
    },
    "diffusion": {
        "c": (1e-3, _POS, "diffusion coefficient [length^2/time]"),
        "c_file": ("", _str, "optional field CSV overriding c pointwise"),
    },
    "ignition": {
        "model": ("constant", _choice("constant", "fuel_memory"), "ignition temperature model"),
        "theta0": (1.0, _real(), "constant ignition temperature [temperature]"),
        "theta_bar": (1.0, _real(), "constitutional ignition temperature for fuel memory [temperature]"),
        "fuel": (1.0, _POS, "fuel capacity F [temperature*time]"),
        "theta_floor": ("none", _choice("none", "theta_bar"), "raise tan(pi B/2F) to at least theta_bar"),
    },
    "kernel": {
        "type": ("bump", _choice("dirac", "bump"), "single-cell delta or truncated hat"),
        "radius": (0.02, _NONNEG, "hat support radius [length]; ignored for dirac"),
        "mass": (10.0, _NONNEG, "total kernel mass [1/time]; 0 disables combustion"),
    },
    "wind": {
        "type": ("constant", _choice("constant", "table"), "wind model"),
        "omega": ([0.0, 0.0], _vec2(), "constant wind vector [length/time]"),
        "table": ([], _rows(3), "rows [t, wx, wy], each held until the next t"),
        "negative_part": (True, _bool, "clamp the transport term to its negative part"),
    },
    "pyro": {
        "alpha": (1.0, _real(0.0, 2.0), "gradient exponent, in [0, 2]"),
        "eps": (1e-8, _NONNEG, "gradient regularisation [temperature/length]"),
        "beta": ([], _rows(2), "rows [u, beta(u)], linearly interpolated; empty means 0"),
    },
    "initial": {
        "type": ("point", _choice("point", "vshape", "square_ring", "file"), "initial temperature shape"),
        "center": ([0.5, 0.5], _vec2(), "point / square_ring centre [length]"),
        "radius": (0.05, _POS, "point hotspot radius [length]"),
        "peak": (2.0, _real(), "plateau temperature of the shape [temperature]"),
        "vertex": ([0.5, 0.3], _vec2(), "vshape vertex [length]"),
        "angle": (30.0, _real(0.0, 180.0, lo_open=True, hi_open=True), "vshape opening angle [degrees]"),
        "direction": (90.0, _real(), "vshape bisector direction, counter-clockwise from +x [degrees]"),
        "arm_length": (0.3, _POS, "vshape arm length [length]"),
        "width": (0.03, _POS, "vshape arm width [length]"),
        "side": (0.3, _POS, "square_ring side length, measured on the ring centre line [length]"),
        "thickness": (0.04, _POS, "square_ring band thickness [length]"),
        "path": ("", _str, "field CSV for type = file"),
    },
    "run": {
        "t_end": (1.0, _NONNEG, "final time [time]"),
        "snapshot_every": (0.1, _NONNEG, "snapshot spacing [time]; 0 keeps only start and end"),
        "cfl_safety": (0.4, _real(0.0, 1.0, lo_open=True), "fraction of the stability bound used"),
        "dt_max": (math.inf, _real(0.0, lo_open=True, finite=False), "upper cap on dt [time]"),
        "fixed_dt": (0.0, _NONNEG, "fixed step [time]; 0 selects the adaptive step"),
    },
}

_ALIASES = {"wind_negative_part": ("wind", "negative_part")}


def default_document() -> dict:
    return {sec: {k: copy.deepcopy(entry[0]) for k, entry in keys.items()} for sec, keys in SCHEMA.items()}


def _line_of(text: str, key: str) -> int | None:
    pat = re.compile(rf"(^|[\s.{{,]){re.escape(key)}\s*=")
    for n, line in enumerate(text.splitlines(), 1):
        if pat.search(line.split("#", 1)[0]):
            return n
    return None


def validate_document(raw: dict, text: str = "") -> dict:
    """Merge a raw key-value mapping onto the defaults, checking every key."""
    doc = default_document()
    for top, value in raw.items():
        if top in _ALIASES:
            sec, key = _ALIASES[top]
            value = {key: value}
            top = sec
        if top not in SCHEMA:
            raise ScenarioParseError(f"unknown section {top!r}; expected one of {', '.join(SCHEMA)}",
                                     _line_of(text, top))
        if not isinstance(value, dict):
            raise ScenarioParseError(f"{top} must be a table of keys", _line_of(text, top))
        for key, v in value.items():
            if key not in SCHEMA[top]:
                raise ScenarioParseError(f"unknown key {top}.{key}", _line_of(text, key))
            try:
                doc[top][key] = SCHEMA[top][key][1](f"{top}.{key}", v)
            except InvalidScenarioError as exc:
                raise ScenarioParseError(str(exc), _line_of(text, key)) from None
    return doc


def parse_document(text: str) -> dict:
    """Parse and validate a scenario document; returns the full key-value mapping."""
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ScenarioParseError(str(exc), int(m.group(1)) if m else None) from None
    return validate_document(raw, text)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    return "[" + ", ".join(_fmt(x) for x in v) + "]"


def dumps(doc: dict) -> str:
    """Serialise a validated document as dotted ``section.key = value`` lines."""
    lines = []
    for sec, keys in SCHEMA.items():
        for key in keys:
            lines.append(f"{sec}.{key} = {_fmt(doc[sec][key])}")
        lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------- initial conditions

@dataclass(frozen=True)
class PointHotspot:
    center: tuple[float, float]
    radius: float
    peak: float


@dataclass(frozen=True)
class VShape:
    vertex: tuple[float, float]
    angle_degrees: float
    arm_length: float
    width: float
    peak: float
    direction_degrees: float = 90.0

    def arm_directions(self) -> list[np.ndarray]:
        half = math.radians(self.angle_degrees) / 2
        d = math.radians(self.direction_degrees)
        return [np.array([math.cos(d + s * half), math.sin(d + s * half)]) for s in (-1, 1)]


@dataclass(frozen=True)
class SquareRing:
    center: tuple[float, float]
    side: float
    thickness: float
    peak: float


@dataclass(frozen=True)
class FieldFile:
    path: str


InitialCondition = PointHotspot | VShape | SquareRing | FieldFile


def _taper(signed_distance, h):
    """1 inside, 0 outside, cosine ramp over ``[-h, h]`` (0.5 on the shape edge)."""
    s = np.clip(signed_distance, -h, h)
    return 0.5 * (1.0 + np.cos(np.pi * (s + h) / (2 * h)))


def _segment_distance(X, Y, a, b):
    ab = b - a
    t = np.clip(((X - a[0]) * ab[0] + (Y - a[1]) * ab[1]) / (ab @ ab), 0.0, 1.0)
    return np.hypot(X - a[0] - t * ab[0], Y - a[1] - t * ab[1])


def _check_inside(grid: Grid, lo, hi, h, what):
    x0 = grid.origin[0] - grid.dx / 2
    y0 = grid.origin[1] - grid.dy / 2
    x1 = x0 + grid.nx * grid.dx
    y1 = y0 + grid.ny * grid.dy
    if lo[0] - h < x0 or lo[1] - h < y0 or hi[0] + h > x1 or hi[1] + h > y1:
        raise InvalidScenarioError(f"{what} does not fit inside the domain")


def build_initial(cond: InitialCondition, grid: Grid, bc: BoundaryCondition = BoundaryCondition(),
                  base_dir: Path | str = ".") -> np.ndarray:
    """Temperature field for an initial condition; the boundary ring is set to ``bc``."""
    from .io import read_field_csv

    h = max(grid.dx, grid.dy)
    X, Y = grid.mesh()
    if isinstance(cond, FieldFile):
        u, g2, _ = read_field_csv(Path(base_dir) / cond.path)
        if g2.shape != grid.shape:
            raise InvalidScenarioError(f"{cond.path}: field is {g2.shape}, scenario grid is {grid.shape}")
        return bc.apply(u)
    if isinstance(cond, PointHotspot):
        c = np.asarray(cond.center, float)
        _check_inside(grid, c - cond.radius, c + cond.radius, h, "point hotspot")
        sd = np.hypot(X - c[0], Y - c[1]) - cond.radius
    elif isinstance(cond, VShape):
        v = np.asarray(cond.vertex, float)
        ends = [v + cond.arm_length * d for d in cond.arm_directions()]
        pts = np.array([v, *ends])
        w = cond.width / 2
        _check_inside(grid, pts.min(0) - w, pts.max(0) + w, h, "v-shape")
        sd = np.minimum(*(_segment_distance(X, Y, v, e) for e in ends)) - w
    elif isinstance(cond, SquareRing):
        c = np.asarray(cond.center, float)
        half = cond.side / 2 + cond.thickness / 2
        if cond.thickness >= cond.side:
            raise InvalidScenarioError("square ring thickness must be smaller than its side")
        _check_inside(grid, c - half, c + half, h, "square ring")
        cheb = np.maximum(np.abs(X - c[0]), np.abs(Y - c[1]))
        sd = np.abs(cheb - cond.side / 2) - cond.thickness / 2
    else:
        raise InvalidScenarioError(f"unknown initial condition {cond!r}")
    return bc.apply(cond.peak * _taper(sd, h))


def initial_condition(section: dict) -> InitialCondition:
    kind = section["type"]
    if kind == "point":
        return PointHotspot(tuple(section["center"]), section["radius"], section["peak"])
    if kind == "vshape":
        return VShape(tuple(section["vertex"]), section["angle"], section["arm_length"],
                      section["width"], section["peak"], section["direction"])
    if kind == "square_ring":
        return SquareRing(tuple(section["center"]), section["side"], section["thickness"], section["peak"])
    if not section["path"]:
        raise InvalidScenarioError("initial.path is required for type = file")
    return FieldFile(section["path"])


# ---------------------------------------------------------------- assembly

def build_scenario(doc: dict, base_dir: Path | str = ".") -> tuple[Scenario, SolverConfig]:
    """Turn a validated document into a :class:`Scenario` and its :class:`SolverConfig`."""
    from .io import read_field_csv

    d = doc["domain"]
    grid = Grid.rectangle(d["nx"], d["ny"], *d["size"])
    bc = BoundaryCondition(d["boundary_value"])

    c = doc["diffusion"]["c"]
    if doc["diffusion"]["c_file"]:
        c, g2, _ = read_field_csv(Path(base_dir) / doc["diffusion"]["c_file"])
        if g2.shape != grid.shape:
            raise InvalidScenarioError("diffusion.c_file does not match the grid")

    ig = doc["ignition"]
    if ig["model"] == "constant":
        ignition = ConstantTheta(ig["theta0"])
    else:
        ignition = FuelMemory(FuelState.fresh(grid, ig["fuel"], ig["theta_bar"]),
                              theta_floor=ig["theta_floor"] == "theta_bar")

    k = doc["kernel"]
    if k["mass"] == 0:
        kernel = InteractionKernel.zero(grid)
    elif k["type"] == "dirac":
        kernel = single_cell_kernel(k["mass"], grid)
    else:
        kernel = build_dirac_kernel(k["radius"], k["mass"], grid)

    w = doc["wind"]
    if w["type"] == "constant":
        wind = ConstantWind(tuple(w["omega"]))
    else:
        wind = TableWind(tuple((row[0], (row[1], row[2])) for row in w["table"]))

    p = doc["pyro"]
    pyro = PyrogenicModel(tuple(tuple(r) for r in p["beta"]), p["alpha"], p["eps"])

    u0 = build_initial(initial_condition(doc["initial"]), grid, bc, base_dir)
    r = doc["run"]
    scenario = Scenario(grid, u0, c, ignition, kernel, wind, pyro, bc,
                        t_end=r["t_end"], snapshot_every=r["snapshot_every"],
                        wind_negative_part=w["negative_part"])
    config = SolverConfig(cfl_safety=r["cfl_safety"], dt_max=r["dt_max"],
                          fixed_dt=r["fixed_dt"] or None)
    return scenario, config


def parse_scenario(text: str, base_dir: Path | str = ".") -> Scenario:
    return build_scenario(parse_document(text), base_dir)[0]


# ---------------------------------------------------------------- presets

PRESETS = {
    "heat-only": {
        "kernel": {"mass": 0.0},
        "initial": {"type": "point", "center": [0.5, 0.5], "radius": 0.1, "peak": 1.5},
        "run": {"t_end": 1.0, "snapshot_every": 0.1},
    },
    "point-e14": {
        "wind": {"omega": [-1.0, 0.4]},
        "initial": {"type": "point", "center": [0.7, 0.4], "radius": 0.04, "peak": 2.0},
        "run": {"t_end": 0.3, "snapshot_every": 0.05},
    },
    "vshape": {
        "initial": {"type": "vshape", "vertex": [0.5, 0.25], "angle": 30.0, "direction": 90.0,
                    "arm_length": 0.35, "width": 0.03, "peak": 2.0},
        "run": {"t_end": 0.4, "snapshot_every": 0.05},
    },
    "square-ring": {
        "initial": {"type": "square_ring", "center": [0.5, 0.5], "side": 0.24, "thickness": 0.04, "peak": 2.0},
        "run": {"t_end": 1.0, "snapshot_every": 0.1},
    },
}


def preset_document(name: str) -> dict:
    if name not in PRESETS:
        raise InvalidScenarioError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return validate_document(PRESETS[name])
