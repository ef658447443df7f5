"""Run configuration: parsing of unit-suffixed quantities, resolution and validation.

Config files are JSON.  Physical inputs are either bare numbers (natural
units: d, tau, hbar/d, hbar/tau) or strings such as ``"4.8 tau"``,
``"108 nm"``, ``"0.1 hbar/tau"`` or ``"40 amu"``.  SI suffixes need an SI
``physical`` section to convert them.
"""
from __future__ import annotations

import copy
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import AMU, HBAR_SI, Grid, NaturalUnits, PhysicalParams, make_grid, natural_units
from .errors import ConfigurationError, DomainError
from .propagator import default_dt, required_extent, required_momentum
from .pulse import coverage_fraction, source_trajectory

DEFAULT_SEED = 24301
SCENARIOS = ("Units", "DeltaPeak", "TargetState", "Litho", "WidthScan")

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\*?\s*(.*?)\s*$")

_SI_SCALE = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9},
    "momentum": {"kg*m/s": 1.0, "kg m/s": 1.0},
    "energy": {"J": 1.0},
    "mass": {"kg": 1.0, "amu": AMU},
    "gradient": {"Hz/m": 1.0, "Hz/cm": 1e2, "Hz/mm": 1e3, "Hz/um": 1e6},
}
_NATURAL = {"length": ("d",), "time": ("tau",), "momentum": ("hbar/d",),
            "energy": ("hbar/tau",)}


@dataclass(frozen=True)
class Finding:
    level: str  # "error" or "warning"
    field: str
    message: str

    def __str__(self):
        return f"{self.level.upper()} {self.field}: {self.message}"


@dataclass(frozen=True)
class UnitContext:
    """Conversion between SI input and natural units (``si`` is None for natural runs)."""

    si: PhysicalParams | None = None
    units: NaturalUnits | None = None

    def to_natural(self, value, kind: str, field_name: str) -> float:
        if isinstance(value, bool) or value is None:
            raise ConfigurationError(f"{field_name}: expected a {kind}, got {value!r}")
        if isinstance(value, (int, float)):
            return float(value)
        m = _QTY.match(str(value))
        if not m:
            raise ConfigurationError(f"{field_name}: cannot parse {value!r}")
        number, unit = float(m.group(1)), m.group(2)
        if unit == "" or unit in _NATURAL.get(kind, ()):
            return number
        if kind == "energy" and unit == "rad/s":
            return number * self._need(field_name).time_tau
        scale = _SI_SCALE.get(kind, {}).get(unit)
        if scale is None:
            raise ConfigurationError(f"{field_name}: unknown unit {unit!r} for a {kind}")
        u = self._need(field_name)
        si = number * scale
        hbar = self.si.hbar
        return {"length": si / u.length_d,
                "time": si / u.time_tau,
                "momentum": si / (hbar / u.length_d),
                "energy": si / (hbar / u.time_tau)}[kind]

    def _need(self, field_name):
        if self.units is None:
            raise ConfigurationError(
                f"{field_name}: SI units need an SI 'physical' section (mass and gradient)")
        return self.units


def parse_si(value, kind: str, field_name: str) -> float:
    """SI value of a mass ('40 amu') or a cyclic frequency gradient ('1e9 Hz/cm')."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    m = _QTY.match(str(value))
    if not m:
        raise ConfigurationError(f"{field_name}: cannot parse {value!r}")
    scale = _SI_SCALE[kind].get(m.group(2) or ("kg" if kind == "mass" else "Hz/m"))
    if scale is None:
        raise ConfigurationError(f"{field_name}: unknown unit {m.group(2)!r} for a {kind}")
    return float(m.group(1)) * scale


def si_params(mass, gradient, field_prefix="physical") -> PhysicalParams:
    m = parse_si(mass, "mass", f"{field_prefix}.mass")
    g = parse_si(gradient, "gradient", f"{field_prefix}.gradient")
    try:
        return PhysicalParams.from_gradient_frequency(m, g, HBAR_SI)
    except DomainError as exc:
        raise ConfigurationError(f"{field_prefix}: {exc}") from None


def set_dotted(config: dict, key: str, value) -> None:
    """Assign ``value`` at a dotted path such as ``pulse.T``."""
    node = config
    parts = key.split(".")
    for p in parts[:-1]:
        node = node.setdefault(p, {})
        if not isinstance(node, dict):
            raise ConfigurationError(f"{key}: {p} is not a section")
    node[parts[-1]] = value


def get_dotted(config: dict, key: str, default=None):
    node = config
    for p in key.split("."):
        if not isinstance(node, dict) or p not in node:
            return default
        node = node[p]
    return node


@dataclass
class RunConfig:
    """A fully resolved run, every physical value in natural units."""

    scenario: str
    params: PhysicalParams
    ctx: UnitContext
    grid: Grid | None
    pulse: dict
    evolution: dict
    section: dict
    output: str
    seed: int
    raw: dict = field(default_factory=dict)


_REQUIRED = {
    "Units": ("physical.mass", "physical.gradient"),
    "DeltaPeak": ("grid.length", "grid.num_points", "pulse.T", "pulse.V_tilde"),
    "TargetState": ("grid.length", "grid.num_points", "pulse.T", "pulse.peak_rabi",
                    "target.kind"),
    "Litho": ("grid.length", "grid.num_points", "pulse.T", "pulse.T_laser"),
    "WidthScan": ("grid.length", "grid.num_points", "pulse.V_tilde", "scan.T_values"),
}


def missing_fields(config: dict) -> list[Finding]:
    scenario = config.get("scenario")
    if scenario is None:
        needed = ("scenario", "grid.length", "grid.num_points", "pulse.T")
    elif scenario not in SCENARIOS:
        return [Finding("error", "scenario",
                        f"unknown scenario {scenario!r}; choose one of {', '.join(SCENARIOS)}")]
    else:
        needed = _REQUIRED[scenario]
    return [Finding("error", k, "required field is missing")
            for k in needed if get_dotted(config, k) is None]


def resolve(config: dict) -> RunConfig:
    """Turn a raw config dict into a :class:`RunConfig`; raises ConfigurationError."""
    missing = missing_fields(config)
    if missing:
        raise ConfigurationError("; ".join(str(f) for f in missing))
    raw = copy.deepcopy(config)
    scenario = raw["scenario"]

    physical = raw.get("physical", "natural")
    if physical == "natural" or physical is None:
        ctx = UnitContext()
    elif isinstance(physical, dict):
        if "mass" not in physical or "gradient" not in physical:
            raise ConfigurationError("physical: needs both mass and gradient, or the string 'natural'")
        si = si_params(physical["mass"], physical["gradient"])
        ctx = UnitContext(si, natural_units(si))
    else:
        raise ConfigurationError(f"physical: expected 'natural' or a section, got {physical!r}")
    params = PhysicalParams.natural()

    def q(key, kind, default=None):
        v = get_dotted(raw, key, default)
        return None if v is None else ctx.to_natural(v, kind, key)

    grid = None
    if scenario != "Units":
        n = get_dotted(raw, "grid.num_points")
        if not isinstance(n, int) or isinstance(n, bool):
            raise ConfigurationError(f"grid.num_points: expected an integer, got {n!r}")
        length = q("grid.length", "length")
        z_min = q("grid.z_min", "length")
        try:
            grid = make_grid(length, n, z_min, params.hbar)
        except ConfigurationError as exc:
            raise ConfigurationError(f"grid: {exc}") from None

    pulse = {
        "T": q("pulse.T", "time"),
        "p0": q("pulse.p0", "momentum", 0.0),
        "z_star": q("pulse.z_star", "length", 0.0),
        "V_tilde": q("pulse.V_tilde", "energy"),
        "peak_rabi": q("pulse.peak_rabi", "energy"),
        "V0": q("pulse.V0", "energy", 1.0),
        "T_laser": q("pulse.T_laser", "time"),
        "compare_monochromatic": bool(get_dotted(raw, "pulse.compare_monochromatic", True)),
        "monochromatic": bool(get_dotted(raw, "pulse.monochromatic", False)),
        "coverage_epsilon": float(get_dotted(raw, "pulse.coverage_epsilon", 1e-4)),
        "p0_given": get_dotted(raw, "pulse.p0") is not None,
    }
    evolution = {
        "dt": q("evolution.dt", "time"),
        "safety": float(get_dotted(raw, "evolution.safety", 1.0)),
        "edge_guard_fraction": float(get_dotted(raw, "evolution.edge_guard_fraction", 0.05)),
        "edge_amplitude_limit": float(get_dotted(raw, "evolution.edge_amplitude_limit", 0.05)),
        "record_every": int(get_dotted(raw, "evolution.record_every", 0)),
    }

    section: dict = {}
    if scenario == "TargetState":
        t = dict(raw["target"])
        kind = t.get("kind")
        section = {"kind": kind}
        if kind == "gaussian":
            section.update(z0=q("target.z0", "length", 0.0), sigma_z=q("target.sigma_z", "length", 4.0),
                           p_c=q("target.p_c", "momentum", 0.0))
        elif kind == "double_gaussian":
            section.update(separation=q("target.separation", "length", 16.0),
                           sigma_z=q("target.sigma_z", "length", 2.0),
                           center=q("target.center", "length", 0.0),
                           p_c=q("target.p_c", "momentum", 0.0),
                           relative_phase=float(t.get("relative_phase", 0.0)))
        elif kind == "file":
            if "path" not in t:
                raise ConfigurationError("target.path: required for target.kind = 'file'")
            section.update(path=str(t["path"]))
        else:
            raise ConfigurationError(
                f"target.kind: expected gaussian, double_gaussian or file, got {kind!r}")
    elif scenario == "Litho":
        section = {
            "pattern": str(get_dotted(raw, "litho.pattern", "double_hump")),
            "N": get_dotted(raw, "litho.N"),
            "dz": q("litho.dz", "length"),
            "realizations": int(get_dotted(raw, "litho.realizations", 20)),
            "workers": int(get_dotted(raw, "litho.workers", 1)),
        }
        if section["N"] is not None and (not isinstance(section["N"], int) or section["N"] < 0):
            raise ConfigurationError(f"litho.N: expected a non-negative integer, got {section['N']!r}")
        if section["realizations"] < 1:
            raise ConfigurationError("litho.realizations: must be >= 1")
    elif scenario == "WidthScan":
        tv = get_dotted(raw, "scan.T_values")
        if isinstance(tv, dict):
            try:
                values = np.linspace(ctx.to_natural(tv["start"], "time", "scan.T_values.start"),
                                     ctx.to_natural(tv["stop"], "time", "scan.T_values.stop"),
                                     int(tv["num"]))
            except KeyError as exc:
                raise ConfigurationError(f"scan.T_values: missing {exc.args[0]}") from None
        elif isinstance(tv, list):
            values = np.array([ctx.to_natural(v, "time", f"scan.T_values[{i}]")
                               for i, v in enumerate(tv)])
        else:
            raise ConfigurationError("scan.T_values: expected a list or {start, stop, num}")
        if values.size == 0 or np.any(values <= 0) or np.any(np.diff(values) < 0):
            raise ConfigurationError("scan.T_values: must be positive and ascending")
        section = {"T_values": values, "chirped": bool(get_dotted(raw, "scan.chirped", False))}

    seed = get_dotted(raw, "seed", DEFAULT_SEED)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigurationError(f"seed: expected a 64-bit non-negative integer, got {seed!r}")
    output = str(raw.get("output", f"out/{scenario}"))
    raw.setdefault("seed", seed)
    raw.setdefault("output", output)
    return RunConfig(scenario, params, ctx, grid, pulse, evolution, section, output, seed, raw)


def max_drive(rc: RunConfig, comb=None) -> float:
    p = rc.pulse
    if rc.scenario in ("DeltaPeak", "WidthScan"):
        return p["V_tilde"] or 0.0
    if rc.scenario == "TargetState":
        return p["peak_rabi"] or 0.0
    if rc.scenario == "Litho" and comb is not None:
        return comb.base_amplitude_V0 * float(comb.weights.sum())
    return 0.0


def step_bound(rc: RunConfig, comb=None) -> float:
    """Configured dt, or the default rule scaled by ``evolution.safety``."""
    if rc.evolution["dt"] is not None:
        return rc.evolution["dt"]
    return default_dt(rc.params, rc.grid, max_drive(rc, comb), rc.evolution["safety"])


def check_grid(rc: RunConfig, T: float, p0: float, z_star: float, target_lo: float,
               target_hi: float) -> list[Finding]:
    """Grid sizing and momentum range rules."""
    out = []
    g, params = rc.grid, rc.params
    guard = rc.evolution["edge_guard_fraction"] * g.length
    need = required_extent(params, T, p0, target_hi - target_lo)
    usable = g.length - 2 * guard
    zs = source_trajectory(np.linspace(0, T, 257), p0, z_star, T, params)
    lo = min(zs.min(), z_star + target_lo) - 4 * natural_units(params).length_d
    hi = max(zs.max(), z_star + target_hi) + 4 * natural_units(params).length_d
    if need > usable or lo < g.z_min + guard or hi > g.z_min + g.length - guard:
        out.append(Finding(
            "error", "grid.length",
            f"grid too small: the source excursion, target and margin need {need:.4g} d "
            f"spanning [{lo:.4g}, {hi:.4g}] d inside the guard bands, but the usable box is "
            f"[{g.z_min + guard:.4g}, {g.z_min + g.length - guard:.4g}] d"))
    pneed = required_momentum(params, T, p0)
    if g.p_max < pneed:
        out.append(Finding(
            "error", "grid.num_points",
            f"momentum lattice too short: Nyquist momentum {g.p_max:.4g} hbar/d < required "
            f"{pneed:.4g} hbar/d; raise num_points or shrink length"))
    return out


def check_dt(rc: RunConfig, comb=None) -> list[Finding]:
    dt = rc.evolution["dt"]
    if dt is None:
        return []
    rule = default_dt(rc.params, rc.grid, max_drive(rc, comb))
    if dt > rule:
        return [Finding("warning", "evolution.dt",
                        f"dt={dt:.4g} tau exceeds the phase-per-step rule {rule:.4g} tau")]
    return []


def target_extent(amplitude, grid: Grid, rel: float = 1e-10) -> tuple[float, float]:
    d = np.abs(amplitude)**2
    idx = np.nonzero(d >= rel * d.max())[0]
    return float(grid.z[idx[0]]), float(grid.z[idx[-1]])


def check_coverage(target, p0: float, T: float, params: PhysicalParams,
                   epsilon: float) -> list[Finding]:
    frac = coverage_fraction(target, p0, T, params)
    if frac < 1 - epsilon:
        return [Finding(
            "error", "pulse.p0",
            f"momentum window [p0, p0 + F T] = [{p0:.4g}, {p0 + params.force * T:.4g}] hbar/d "
            f"covers only {frac:.6f} of the target's momentum distribution "
            f"(coverage requirement: >= 1 - {epsilon:g}); adjust pulse.p0 or pulse.T")]
    return []


def load_config(path) -> dict:
    import json
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
