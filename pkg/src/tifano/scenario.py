"""Scenario files: a YAML document describing one hybrid system plus grid, sweep and overrides.

Dimensioned values are strings with a mandatory unit tag, e.g. ``"5 nm"``, ``"2.2 eV"``,
``"10 ns"`` (a lifetime, converted to a rate) or ``"7.2e-28 C*m"``. Dimensionless values are
plain numbers. Energies convert to angular frequencies with hbar = 1.054571817e-34 J s.

Schema (``?`` marks optional keys)::

    material:
      mode_energy: <energy>            # either this pair ...
      static_permittivity: <number>
      omega_e: <energy>                # ... or the bare oscillator parameters
      omega_R: <energy>
      gamma_0?: <rate>
      mu_1?: <number>
      theta_over_pi?: <number>
      quantized_theta?: <bool>
    host?: {epsilon_2?: <number>, mu_2?: <number>}
    sphere: {radius: <length>}
    emitter:
      energy: <energy>
      dipole: <dipole>
      gamma_s?: <rate>
      polarizability?: <polarizability>
      n?: <number>
    separation: <length>
    orientation?: longitudinal | transverse
    grid?: {start: <energy>, stop: <energy>, n: <int>}  or a list of such segments
    sweep?: {axis: <axis>, values: [...]}
    overrides?: {Omega?: <energy>, g?: <energy>, gamma_r?: <rate>}
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import numpy as np
import yaml

from .io import ELEMENTARY_CHARGE, HBAR
from .materials import DielectricModel, HostMedium, TIMaterial
from .quantization import ANGSTROM3_TO_SI, HybridScenario, Orientation, QuantumDot
from .quasistatics import SphereGeometry, dielectric_from_mode
from .spectrum import SWEEP_AXES

__all__ = [
    "ScenarioError",
    "ScenarioFile",
    "parse_quantity",
    "load_scenario",
    "load_scenario_text",
    "preset_names",
    "preset_path",
    "parse_grid",
]

_EV = ELEMENTARY_CHARGE / HBAR  # rad/s per eV
_DEBYE = 1e-21 / 299_792_458.0

UNITS = {
    "length": {"m": 1.0, "nm": 1e-9, "um": 1e-6, "pm": 1e-12, "A": 1e-10},
    "energy": {"rad/s": 1.0, "eV": _EV, "meV": 1e-3 * _EV, "J": 1.0 / HBAR},
    "rate": {"1/s": 1.0, "s^-1": 1.0, "eV": _EV, "meV": 1e-3 * _EV},
    "lifetime": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15},
    "dipole": {"C*m": 1.0, "C m": 1.0, "D": _DEBYE, "e*nm": ELEMENTARY_CHARGE * 1e-9},
    "polarizability": {"A^3": ANGSTROM3_TO_SI, "C*m^2/V": 1.0},
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S.*?)\s*$")


class ScenarioError(ValueError):
    """Malformed scenario document; carries the offending key path and line."""

    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key:
            where.append(key)
        super().__init__(": ".join(where + [message]) if where else message)
        self.key = key
        self.line = line


def parse_quantity(text, kind: str, key: str = "", line=None) -> float:
    """``"5 nm"`` -> 5e-9. Lifetimes are accepted wherever a rate is expected."""
    if isinstance(text, bool) or not isinstance(text, str):
        raise ScenarioError(f"missing unit tag (expected a {kind} such as '1 {next(iter(UNITS[kind]))}')", key, line)
    m = _QUANTITY.match(text)
    if not m:
        try:
            float(text)
        except ValueError:
            raise ScenarioError(f"cannot parse {text!r} as a {kind}", key, line) from None
        raise ScenarioError(f"missing unit tag (expected a {kind} such as '{text.strip()} {next(iter(UNITS[kind]))}')", key, line)
    value, unit = float(m.group(1)), m.group(2)
    table = UNITS[kind]
    if unit in table:
        out = value * table[unit]
    elif kind == "rate" and unit in UNITS["lifetime"]:
        if value <= 0:
            raise ScenarioError("lifetime must be positive", key, line)
        out = 1.0 / (value * UNITS["lifetime"][unit])
    else:
        allowed = list(table) + (list(UNITS["lifetime"]) if kind == "rate" else [])
        raise ScenarioError(f"unknown unit {unit!r} for a {kind}; allowed: {', '.join(allowed)}", key, line)
    if not math.isfinite(out):
        raise ScenarioError(f"value {text!r} is not finite", key, line)
    return out


# --- YAML with line numbers ---------------------------------------------------


@dataclass
class _Node:
    value: Any
    line: int


def _convert(node):
    line = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = _convert(k).value
            if key in out:
                raise ScenarioError("duplicate key", str(key), k.start_mark.line + 1)
            out[key] = _convert(v)
        return _Node(out, line)
    if isinstance(node, yaml.SequenceNode):
        return _Node([_convert(v) for v in node.value], line)
    value = node.value
    tag = node.tag
    if tag.endswith(":int"):
        value = int(node.value.replace("_", ""), 0)
    elif tag.endswith(":float"):
        value = float(node.value.replace("_", ""))
    elif tag.endswith(":bool"):
        value = node.value.lower() in ("true", "yes", "on")
    elif tag.endswith(":null"):
        value = None
    return _Node(value, line)


class _Section:
    """Key access over a mapping node that tracks which keys were consumed."""

    def __init__(self, node: _Node, path: str):
        if not isinstance(node.value, dict):
            raise ScenarioError("expected a mapping", path or "<root>", node.line)
        self.node, self.path, self.seen = node, path, set()

    def _key(self, name):
        return f"{self.path}.{name}" if self.path else name

    def has(self, name):
        return name in self.node.value

    def raw(self, name, required=True, default=None):
        self.seen.add(name)
        if name not in self.node.value:
            if required:
                raise ScenarioError("required key is missing", self._key(name), self.node.line)
            return default, None
        n = self.node.value[name]
        return n.value, n.line

    def quantity(self, name, kind, required=True, default=None):
        value, line = self.raw(name, required, None)
        if value is None and line is None:
            return default
        return parse_quantity(value, kind, self._key(name), line)

    def number(self, name, required=True, default=None):
        value, line = self.raw(name, required, None)
        if value is None and line is None:
            return default
        if isinstance(value, bool):
            raise ScenarioError("expected a number", self._key(name), line)
        if isinstance(value, str):
            try:
                value = float(value)
            except ValueError:
                raise ScenarioError(f"expected a dimensionless number, got {value!r}", self._key(name), line) from None
        if not math.isfinite(value):
            raise ScenarioError("value is not finite", self._key(name), line)
        return float(value)

    def section(self, name, required=True):
        self.seen.add(name)
        if name not in self.node.value:
            if required:
                raise ScenarioError("required section is missing", self._key(name), self.node.line)
            return None
        return _Section(self.node.value[name], self._key(name))

    def finish(self):
        for name, n in self.node.value.items():
            if name not in self.seen:
                raise ScenarioError("unknown key", self._key(str(name)), n.line)


@dataclass(frozen=True)
class GridSegment:
    start: float  # rad/s
    stop: float
    n: int


@dataclass(frozen=True)
class ScenarioFile:
    scenario: HybridScenario
    grid: tuple = ()
    sweep_axis: str | None = None
    sweep_values: tuple = ()
    overrides: dict = field(default_factory=dict)
    source: str = ""

    def omega_grid(self):
        if not self.grid:
            return None
        return merge_segments(self.grid)


def merge_segments(segments) -> np.ndarray:
    parts = [np.linspace(s.start, s.stop, s.n) for s in segments]
    return np.unique(np.concatenate(parts))


def _grid_segment(sec: _Section) -> GridSegment:
    start = sec.quantity("start", "energy")
    stop = sec.quantity("stop", "energy")
    n_raw, line = sec.raw("n")
    sec.finish()
    if isinstance(n_raw, bool) or not isinstance(n_raw, int):
        raise ScenarioError("grid size must be an integer", f"{sec.path}.n", line)
    return _checked_segment(start, stop, n_raw, sec.path, sec.node.line)


def _checked_segment(start, stop, n, key="grid", line=None) -> GridSegment:
    if n < 1:
        raise ScenarioError("frequency grid is empty", key, line)
    if n > 1 and not stop > start:
        raise ScenarioError("grid stop must exceed start", key, line)
    if start <= 0:
        raise ScenarioError("grid must lie at positive frequencies", key, line)
    return GridSegment(start, stop, n)


def parse_grid(text: str) -> GridSegment:
    """``"start,stop,n"`` in eV, as given on the command line."""
    parts = text.split(",")
    if len(parts) != 3:
        raise ScenarioError("grid must be 'start,stop,n' in eV", "--grid")
    try:
        start, stop, n = float(parts[0]) * _EV, float(parts[1]) * _EV, int(parts[2])
    except ValueError:
        raise ScenarioError(f"cannot parse grid {text!r}", "--grid") from None
    return _checked_segment(start, stop, n, "--grid")


SWEEP_KINDS = {"omega_a": "energy", "r": "length", "alpha_tilde": None, "n": None, "orientation": None}


def _sweep_value(axis, node: _Node, key):
    kind = SWEEP_KINDS[axis]
    if axis == "orientation":
        try:
            return Orientation(node.value).value
        except ValueError:
            raise ScenarioError(f"unknown orientation {node.value!r}", key, node.line) from None
    if kind is None:
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ScenarioError("sweep value must be a plain number", key, node.line)
        return float(node.value)
    return parse_quantity(node.value, kind, key, node.line)


def _build(root: _Node, source: str) -> ScenarioFile:
    top = _Section(root, "")

    mat = top.section("material")
    gamma_0 = mat.quantity("gamma_0", "rate", required=False, default=0.0)
    mu_1 = mat.number("mu_1", required=False, default=1.0)
    theta = mat.number("theta_over_pi", required=False, default=1.0)
    quantized, qline = mat.raw("quantized_theta", required=False, default=False)
    if not isinstance(quantized, bool):
        raise ScenarioError("expected true or false", "material.quantized_theta", qline)

    host_sec = top.section("host", required=False)
    if host_sec is None:
        host = HostMedium()
    else:
        host = HostMedium(
            epsilon_2=host_sec.number("epsilon_2", required=False, default=1.0),
            mu_2=host_sec.number("mu_2", required=False, default=1.0),
        )
        host_sec.finish()

    by_mode = mat.has("mode_energy") or mat.has("static_permittivity")
    by_oscillator = mat.has("omega_e") or mat.has("omega_R")
    if by_mode == by_oscillator:
        raise ScenarioError(
            "give either mode_energy + static_permittivity or omega_e + omega_R", "material", mat.node.line
        )
    if by_mode:
        dielectric = dielectric_from_mode(
            mat.quantity("mode_energy", "energy"),
            mat.number("static_permittivity"),
            host,
            mu_1=mu_1,
            theta_over_pi=theta,
            gamma_0=gamma_0,
        )
    else:
        dielectric = DielectricModel(
            omega_e=mat.quantity("omega_e", "energy"),
            omega_R=mat.quantity("omega_R", "energy"),
            gamma_0=gamma_0,
        )
    mat.finish()
    ti = TIMaterial(dielectric, mu_1=mu_1, theta_over_pi=theta, quantized_theta=quantized)

    sph = top.section("sphere")
    geom = SphereGeometry(sph.quantity("radius", "length"))
    sph.finish()

    em = top.section("emitter")
    qd = QuantumDot(
        omega_a=em.quantity("energy", "energy"),
        dipole_d=em.quantity("dipole", "dipole"),
        gamma_s=em.quantity("gamma_s", "rate", required=False, default=0.0),
        polarizability_f=em.quantity("polarizability", "polarizability", required=False, default=0.0),
        n_excitation=em.number("n", required=False, default=0.0),
    )
    em.finish()

    separation = top.quantity("separation", "length")
    orient_raw, oline = top.raw("orientation", required=False, default="longitudinal")
    try:
        orientation = Orientation(orient_raw)
    except ValueError:
        raise ScenarioError(f"unknown orientation {orient_raw!r}", "orientation", oline) from None

    grid = ()
    if top.has("grid"):
        gnode = root.value["grid"]
        top.seen.add("grid")
        if isinstance(gnode.value, list):
            if not gnode.value:
                raise ScenarioError("frequency grid is empty", "grid", gnode.line)
            grid = tuple(_grid_segment(_Section(n, f"grid[{i}]")) for i, n in enumerate(gnode.value))
        else:
            grid = (_grid_segment(_Section(gnode, "grid")),)

    sweep_axis, sweep_values = None, ()
    sw = top.section("sweep", required=False)
    if sw is not None:
        sweep_axis, aline = sw.raw("axis")
        if sweep_axis not in SWEEP_AXES:
            raise ScenarioError(f"unknown sweep axis {sweep_axis!r}; choose from {', '.join(SWEEP_AXES)}", "sweep.axis", aline)
        vals, vline = sw.raw("values")
        if not isinstance(vals, list) or not vals:
            raise ScenarioError("sweep values must be a non-empty list", "sweep.values", vline)
        sweep_values = tuple(_sweep_value(sweep_axis, v, f"sweep.values[{i}]") for i, v in enumerate(vals))
        sw.finish()

    overrides = {}
    ov = top.section("overrides", required=False)
    if ov is not None:
        for name, kind in (("Omega", "energy"), ("g", "energy"), ("gamma_r", "rate")):
            value = ov.quantity(name, kind, required=False, default=None)
            if value is not None:
                overrides[name] = value
        ov.finish()
    top.finish()

    scenario = HybridScenario(ti, host, geom, qd, separation, orientation)
    return ScenarioFile(
        scenario=scenario,
        grid=grid,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        overrides=overrides,
        source=source,
    )


def load_scenario_text(text: str, source: str = "<string>") -> ScenarioFile:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"invalid YAML: {getattr(exc, 'problem', exc)}", None, mark.line + 1 if mark else None) from None
    if node is None:
        raise ScenarioError("empty scenario document")
    return _build(_convert(node), source)


def load_scenario(path) -> ScenarioFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc.strerror}", str(path)) from None
    return load_scenario_text(text, str(path))


def preset_names() -> list[str]:
    root = resources.files("tifano") / "presets"
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def preset_path(name: str):
    if name not in preset_names():
        raise ScenarioError(f"unknown preset {name!r}; see 'presets list'")
    return resources.files("tifano") / "presets" / f"{name}.yaml"
