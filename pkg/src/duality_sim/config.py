"""Run configuration: a YAML file mapped onto the library's value types.

Errors carry ``file:line`` locations. Structural problems raise
:class:`ConfigError`; physically invalid values raise :class:`ConfigValidationError`.

Complex numbers are written as ``[magnitude, phase]`` (phase in radians) or as a
plain real number. Complex vectors are lists of such entries.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from .emission import EmissionGeometry, ModeConfig
from .errors import ValidationError
from .source_state import Purification, SourceState, trace_out


class ConfigError(Exception):
    """Malformed configuration (syntax, missing or unknown keys, wrong types)."""


class ConfigValidationError(ValidationError):
    """Configuration is well formed but violates a physical invariant."""


@dataclass(frozen=True)
class Simulation:
    mean_total: float
    seed: Optional[int] = None
    angles: Optional[int] = None


@dataclass(frozen=True)
class Sweep:
    p_a: float
    mixing: list = field(default_factory=list)
    phase: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    path: str
    source: Optional[SourceState] = None
    geometry: Optional[EmissionGeometry] = None
    modes: Optional[ModeConfig] = None
    simulation: Optional[Simulation] = None
    sweep: Optional[Sweep] = None
    angles: Any = None  # None, a point count, or an explicit array of radians
    lines: dict = field(default_factory=dict, repr=False)

    def where(self, *keys) -> str:
        """``file:line`` of the deepest recorded key along ``keys``."""
        for n in range(len(keys), -1, -1):
            if keys[:n] in self.lines:
                return f"{self.path}:{self.lines[keys[:n]]}"
        return self.path


# --- YAML walking ----------------------------------------------------------


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads ``1e-3`` style floats (YAML 1.2 behaviour)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"),
    list("-+0123456789"),
)


def _walk(node, loader, path, lines, fname):
    lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for key_node, value_node in node.value:
            key = loader.construct_object(key_node)
            if not isinstance(key, str):
                raise ConfigError(f"{fname}:{key_node.start_mark.line + 1}: keys must be strings")
            if key in out:
                raise ConfigError(f"{fname}:{key_node.start_mark.line + 1}: duplicate key {key!r}")
            out[key] = _walk(value_node, loader, path + (key,), lines, fname)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_walk(item, loader, path + (i,), lines, fname) for i, item in enumerate(node.value)]
    return loader.construct_object(node)


def parse_yaml(text: str, fname: str = "<config>"):
    """Parse YAML text into plain Python values plus a {key path: line} map."""
    loader = _Loader(text)
    try:
        node = loader.get_single_node()
        if node is None:
            return {}, {}
        lines = {}
        data = _walk(node, loader, (), lines, fname)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else "?"
        raise ConfigError(f"{fname}:{line}: {exc.problem or exc}") from None
    finally:
        loader.dispose()
    return data, lines


# --- typed field access -----------------------------------------------------


class _Reader:
    def __init__(self, fname, lines):
        self.fname = fname
        self.lines = lines

    def loc(self, path) -> str:
        for n in range(len(path), -1, -1):
            if path[:n] in self.lines:
                return f"{self.fname}:{self.lines[path[:n]]}"
        return self.fname

    def fail(self, path, msg):
        raise ConfigError(f"{self.loc(path)}: {msg}")

    def section(self, value, path, allowed):
        if not isinstance(value, dict):
            self.fail(path, f"'{'.'.join(map(str, path))}' must be a mapping")
        for key in value:
            if key not in allowed:
                self.fail(path + (key,), f"unknown key {key!r} (expected one of {', '.join(allowed)})")
        return value

    def real(self, value, path):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            self.fail(path, "number must be finite")
        return float(value)

    def integer(self, value, path):
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, f"expected an integer, got {value!r}")
        return value

    def complex_(self, value, path):
        if isinstance(value, list):
            if len(value) != 2:
                self.fail(path, "complex numbers are written [magnitude, phase]")
            mag = self.real(value[0], path + (0,))
            phase = self.real(value[1], path + (1,))
            if mag < 0:
                self.fail(path + (0,), "magnitude must be non-negative")
            return cmath.rect(mag, phase)
        return complex(self.real(value, path))

    def reals(self, value, path, size=None):
        if not isinstance(value, list):
            self.fail(path, "expected a list of numbers")
        if size is not None and len(value) != size:
            self.fail(path, f"expected {size} entries, got {len(value)}")
        return [self.real(v, path + (i,)) for i, v in enumerate(value)]

    def complexes(self, value, path, size=None):
        if not isinstance(value, list) or not value:
            self.fail(path, "expected a non-empty list of complex entries")
        if size is not None and len(value) != size:
            self.fail(path, f"expected {size} entries, got {len(value)}")
        return np.array([self.complex_(v, path + (i,)) for i, v in enumerate(value)])

    def required(self, sec, key, path):
        if key not in sec:
            self.fail(path, f"missing required key {key!r}")
        return sec[key]

    def build(self, path, factory, *args):
        try:
            return factory(*args)
        except ValidationError as exc:
            raise ConfigValidationError(f"{self.loc(path)}: {exc}") from None


def _source(r: _Reader, value):
    path = ("source",)
    sec = r.section(value, path, ("purification", "direct"))
    if len(sec) != 1:
        r.fail(path, "source needs exactly one of 'purification' or 'direct'")
    if "direct" in sec:
        p = path + ("direct",)
        d = r.section(sec["direct"], p, ("p_a", "p_b", "gamma"))
        p_a = r.real(r.required(d, "p_a", p), p + ("p_a",))
        p_b = r.real(d["p_b"], p + ("p_b",)) if "p_b" in d else 1.0 - p_a
        gamma = r.complex_(d.get("gamma", 0.0), p + ("gamma",))
        if "gamma" in d and abs(gamma) > math.sqrt(max(p_a * p_b, 0.0)):
            p = p + ("gamma",)
        return r.build(p, SourceState, p_a, p_b, gamma)
    p = path + ("purification",)
    d = r.section(sec["purification"], p, ("c_a", "c_b", "m", "n"))
    c_a = r.complex_(r.required(d, "c_a", p), p + ("c_a",))
    c_b = r.complex_(r.required(d, "c_b", p), p + ("c_b",))
    m = r.complexes(d.get("m", [1.0]), p + ("m",))
    n = r.complexes(d.get("n", [1.0]), p + ("n",))
    pur = r.build(p, Purification, c_a, c_b, m, n)
    return r.build(p, trace_out, pur)


def _geometry(r: _Reader, value):
    path = ("geometry",)
    g = r.section(value, path, ("k", "wavelength", "R_A", "R_B", "r_hat", "phi_A", "phi_B"))
    if ("k" in g) == ("wavelength" in g):
        r.fail(path, "geometry needs exactly one of 'k' or 'wavelength'")
    R_A = r.reals(g.get("R_A", [0.0, 0.0, 0.0]), path + ("R_A",), 3)
    R_B = r.reals(r.required(g, "R_B", path), path + ("R_B",), 3)
    r_hat = r.reals(r.required(g, "r_hat", path), path + ("r_hat",), 3)
    phi_A = r.real(g.get("phi_A", 0.0), path + ("phi_A",))
    phi_B = r.real(g.get("phi_B", 0.0), path + ("phi_B",))
    if "k" in g:
        return r.build(path, EmissionGeometry, r.real(g["k"], path + ("k",)), R_A, R_B, r_hat, phi_A, phi_B)
    wl = r.real(g["wavelength"], path + ("wavelength",))
    return r.build(path, EmissionGeometry.from_wavelength, wl, R_A, R_B, r_hat, phi_A, phi_B)


def _modes(r: _Reader, value):
    path = ("modes",)
    m = r.section(value, path, ("eps_a", "eps_b", "eta", "chi"))
    if "eta" in m:
        if "eps_a" in m or "eps_b" in m:
            r.fail(path, "give either eps_a/eps_b or eta, not both")
        eta = r.complex_(m["eta"], path + ("eta",))
        chi = r.real(m.get("chi", 0.0), path + ("chi",))
        return r.build(path, ModeConfig.canonical, eta, chi)
    if "chi" in m:
        r.fail(path + ("chi",), "chi only applies together with eta")
    eps_a = r.complexes(r.required(m, "eps_a", path), path + ("eps_a",), 2)
    eps_b = r.complexes(r.required(m, "eps_b", path), path + ("eps_b",), 2)
    return r.build(path, ModeConfig, eps_a, eps_b)


def _simulation(r: _Reader, value):
    path = ("simulation",)
    s = r.section(value, path, ("angles", "mean_total", "seed"))
    mean_total = r.real(r.required(s, "mean_total", path), path + ("mean_total",))
    seed = r.integer(s["seed"], path + ("seed",)) if "seed" in s else None
    angles = r.integer(s["angles"], path + ("angles",)) if "angles" in s else None
    return Simulation(mean_total, seed, angles)


def _sweep(r: _Reader, value):
    path = ("sweep",)
    s = r.section(value, path, ("p_a", "mixing", "phase"))
    p_a = r.real(r.required(s, "p_a", path), path + ("p_a",))
    mixing = r.reals(s.get("mixing", []), path + ("mixing",))
    phase = r.real(s.get("phase", 0.0), path + ("phase",))
    if not 0.0 <= p_a <= 1.0:
        raise ConfigValidationError(f"{r.loc(path + ('p_a',))}: p_a must lie in [0, 1]")
    for i, mv in enumerate(mixing):
        if not 0.0 <= mv <= 1.0:
            raise ConfigValidationError(f"{r.loc(path + ('mixing', i))}: mixing values must lie in [0, 1]")
    return Sweep(p_a, mixing, phase)


def _angles(r: _Reader, value):
    path = ("angles",)
    if isinstance(value, list):
        return np.array(r.reals(value, path))
    return r.integer(value, path)


_SECTIONS = {
    "source": _source,
    "geometry": _geometry,
    "modes": _modes,
    "simulation": _simulation,
    "sweep": _sweep,
    "angles": _angles,
}


def load_config_text(text: str, fname: str = "<config>") -> RunConfig:
    data, lines = parse_yaml(text, fname)
    r = _Reader(fname, lines)
    r.section(data, (), tuple(_SECTIONS))
    parsed = {key: _SECTIONS[key](r, value) for key, value in data.items()}
    return RunConfig(path=fname, lines=lines, **parsed)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return load_config_text(text, str(path))
