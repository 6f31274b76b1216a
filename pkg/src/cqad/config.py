"""Strict JSON parameter files with unit-bearing values.

Any numeric field may be written either as a bare number in SI units or as a
string ``"<value> <unit>"`` (``"4.24 GHz"``, ``"125 um"``, ``"79.2 uA"``).
Units are converted once at parse time; everything downstream is SI.  Unknown
keys, wrong dimensions and malformed values raise :class:`ConfigError`.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from .bragg_cavity import CavitySpec, MirrorParams, Mode, ModeTable
from .errors import ConfigError, CqadError
from .phonon_idt import IdtParams, LambVariant, QubitEnvironment
from .spectra import NumberSplitParams
from .transmon import TransmonParams

_UNITS = {
    "freq": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12},
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9},
    "current": {"A": 1.0, "mA": 1e-3, "uA": 1e-6, "nA": 1e-9},
    "speed": {"m/s": 1.0, "km/s": 1e3},
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]+)?\s*$")

# field -> dimension, or a python type for dimensionless values
_IDT = {
    "n_periods": int,
    "center_freq": "freq",
    "delay": "time",
    "max_emission": "freq",
    "max_coupling": "freq",
    "sound_speed": "speed",
    "pitch": "length",
    "half_length": "length",
    "separation": "length",
}
_ENVIRONMENT = {"q_internal": float, "lamb_variant": str}
_MIRROR = {"n_strips": int, "strip_reflectivity": float, "pitch": "length", "sound_speed": "speed"}
_CAVITY = {
    "mirror_separation": "length",
    "sound_speed": "speed",
    "loss": "freq",
    "odd_coupling_factor": float,
    "transverse_coupling_factor": float,
}
_TRANSMON = {
    "zero_field_freq": "freq",
    "asymmetry": float,
    "half_quantum_current": "current",
    "offset_current": "current",
    "anharmonicity": "freq",
    "q_internal": float,
    "pure_dephasing": "freq",
}
_MODE = {
    "freq": "freq",
    "longitudinal_index": int,
    "parity": str,
    "transverse": bool,
    "loss": "freq",
    "coupling": "freq",
}
_NUMBERSPLIT = {
    "qubit_freq": "freq",
    "qubit_linewidth": "freq",
    "mode_loss": "freq",
    "half_shift": "freq",
    "n_max": int,
    "offset": float,
    "amplitude": "freq",
    "pull_per_phonon": "freq",
    "span_below": "freq",
    "span_above": "freq",
    "n_points": int,
    "noise": float,
}
_DRIVE = {"powers": list, "conversion": float}
_SWEEPS = {
    "freq_start": "freq",
    "freq_stop": "freq",
    "freq_step": "freq",
    "current_start": "current",
    "current_stop": "current",
    "n_currents": int,
    "crossing_noise": "freq",
}
_SECTIONS = ("idt", "environment", "mirror", "cavity", "transmon", "modes", "numbersplit", "drive", "sweeps")


def parse_quantity(value: Any, dimension: str, where: str = "value") -> float:
    """Return ``value`` in SI units; bare numbers are taken as SI already."""
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a {dimension} quantity, got a boolean")
    if isinstance(value, (int, float)):
        number, unit = float(value), None
    elif isinstance(value, str):
        m = _QUANTITY.match(value)
        if not m:
            raise ConfigError(f"{where}: cannot parse {value!r} as a {dimension} quantity")
        number, unit = float(m.group(1)), m.group(2)
    else:
        raise ConfigError(f"{where}: expected a number or unit string, got {type(value).__name__}")
    if unit is not None:
        table = _UNITS[dimension]
        if unit not in table:
            raise ConfigError(f"{where}: unit {unit!r} is not a {dimension} unit (expected one of {sorted(table)})")
        number *= table[unit]
    if not math.isfinite(number):
        raise ConfigError(f"{where}: value must be finite")
    return number


def _coerce(value, kind, where):
    if isinstance(kind, str):
        return parse_quantity(value, kind, where)
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list")
        return value
    raise TypeError(kind)


def _section(raw: Any, schema: Mapping[str, Any], name: str) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"{name}: unknown keys {unknown}")
    return {k: _coerce(v, schema[k], f"{name}.{k}") for k, v in raw.items()}


@dataclass(frozen=True)
class CavityOptions:
    """Cavity geometry plus the coupling model used to populate its modes."""

    spec: CavitySpec
    loss: float = 250e3
    odd_coupling_factor: float = 0.15
    transverse_coupling_factor: float = 0.2


@dataclass(frozen=True)
class NumberSplitOptions:
    params: NumberSplitParams
    span_below: float = 6e6
    span_above: float = 2e6
    n_points: int = 801
    noise: float = 0.0


@dataclass(frozen=True)
class DriveSweep:
    powers: tuple
    conversion: float = 1.0


@dataclass(frozen=True)
class Sweeps:
    freq_start: float = 3.8e9
    freq_stop: float = 4.8e9
    freq_step: float = 0.1e6
    current_start: Optional[float] = None
    current_stop: Optional[float] = None
    n_currents: int = 600
    crossing_noise: float = 0.0


@dataclass(frozen=True)
class Config:
    idt: Optional[IdtParams] = None
    environment: Optional[QubitEnvironment] = None
    mirror: Optional[MirrorParams] = None
    cavity: Optional[CavityOptions] = None
    transmon: Optional[TransmonParams] = None
    modes: Optional[ModeTable] = None
    numbersplit: Optional[NumberSplitOptions] = None
    drive: Optional[DriveSweep] = None
    sweeps: Sweeps = Sweeps()

    def require(self, *names: str):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError(f"config lacks required sections {missing}")
        return tuple(getattr(self, n) for n in names)


def parse_config(doc: Mapping[str, Any]) -> Config:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    unknown = sorted(set(doc) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}")
    try:
        return _build(doc)
    except ConfigError:
        raise
    except (CqadError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _build(doc) -> Config:
    out: dict = {}
    if "idt" in doc:
        out["idt"] = IdtParams(**_section(doc["idt"], _IDT, "idt"))
    if "environment" in doc:
        env = _section(doc["environment"], _ENVIRONMENT, "environment")
        if "lamb_variant" in env:
            env["lamb_variant"] = LambVariant(env["lamb_variant"])
        out["environment"] = QubitEnvironment(**env)
    mirror = None
    if "mirror" in doc:
        mirror = MirrorParams(**_section(doc["mirror"], _MIRROR, "mirror"))
        out["mirror"] = mirror
    if "cavity" in doc:
        cav = _section(doc["cavity"], _CAVITY, "cavity")
        if mirror is None:
            raise ConfigError("cavity section requires a mirror section")
        spec_keys = {k: cav.pop(k) for k in ("mirror_separation", "sound_speed") if k in cav}
        if "mirror_separation" not in spec_keys:
            raise ConfigError("cavity.mirror_separation is required")
        out["cavity"] = CavityOptions(CavitySpec(mirrors=mirror, **spec_keys), **cav)
    if "transmon" in doc:
        out["transmon"] = TransmonParams(**_section(doc["transmon"], _TRANSMON, "transmon"))
    if "modes" in doc:
        rows = doc["modes"]
        if not isinstance(rows, list):
            raise ConfigError("modes: expected a list of mode objects")
        out["modes"] = ModeTable(tuple(Mode(**_section(r, _MODE, f"modes[{i}]")) for i, r in enumerate(rows)))
    if "numbersplit" in doc:
        ns = _section(doc["numbersplit"], _NUMBERSPLIT, "numbersplit")
        extra = {k: ns.pop(k) for k in ("span_below", "span_above", "n_points", "noise") if k in ns}
        out["numbersplit"] = NumberSplitOptions(NumberSplitParams(**ns), **extra)
    if "drive" in doc:
        d = _section(doc["drive"], _DRIVE, "drive")
        powers = tuple(_coerce(p, float, "drive.powers[]") for p in d.get("powers", []))
        if any(p < 0 for p in powers):
            raise ConfigError("drive.powers must be >= 0")
        out["drive"] = DriveSweep(powers, d.get("conversion", 1.0))
    if "sweeps" in doc:
        out["sweeps"] = Sweeps(**_section(doc["sweeps"], _SWEEPS, "sweeps"))
    return Config(**out)


def load_config(path: Union[str, Path]) -> Config:
    """Read and validate a JSON parameter file.  Raises ConfigError on any problem."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from exc
    return parse_config(doc)


def reference_config_text() -> str:
    return resources.files("cqad").joinpath("data/reference.json").read_text(encoding="utf-8")


def reference_config() -> Config:
    """The shipped reference parameter set."""
    return parse_config(json.loads(reference_config_text()))
