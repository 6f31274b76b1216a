"""Flux-tunable transmon: frequency vs coil current, coherence and linewidth arithmetic."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import DomainError, PhysicalityError, TuningRangeError


@dataclass(frozen=True)
class TransmonParams:
    """Asymmetric-SQUID transmon.

    ``half_quantum_current`` is the coil current that threads half a flux
    quantum; ``asymmetry`` is the normalised junction critical-current
    difference.
    """

    zero_field_freq: float
    asymmetry: float
    half_quantum_current: float
    offset_current: float = 0.0
    anharmonicity: float = -190e6
    q_internal: float = 1.2e4
    pure_dephasing: float = 30e3

    def __post_init__(self):
        if not self.zero_field_freq > 0:
            raise DomainError("zero_field_freq must be > 0")
        if not 0 <= self.asymmetry <= 1:
            raise DomainError("asymmetry must lie in [0, 1]")
        if not self.half_quantum_current > 0:
            raise DomainError("half_quantum_current must be > 0")
        if not self.anharmonicity < 0:
            raise DomainError("anharmonicity must be negative")
        if not self.q_internal > 0:
            raise DomainError("q_internal must be > 0")

    @property
    def tunable_band(self) -> tuple[float, float]:
        return self.zero_field_freq * math.sqrt(self.asymmetry), self.zero_field_freq


def freq_vs_current(current, p: TransmonParams):
    """f_q(I) = f0 [a^2 + (1 - a^2) cos^2(pi (I - I0) / Ic)]^(1/4)."""
    phase = np.pi * (np.asarray(current, dtype=float) - p.offset_current) / p.half_quantum_current
    a2 = p.asymmetry**2
    f = p.zero_field_freq * (a2 + (1.0 - a2) * np.cos(phase) ** 2) ** 0.25
    return f if np.ndim(f) else float(f)


def current_for_freq(f_target: float, p: TransmonParams) -> float:
    """Coil current on the principal branch [I0, I0 + Ic/2] that tunes the qubit to ``f_target``."""
    f_min, f_max = p.tunable_band
    # admit round-off at the band edges
    slack = 1e-12 * f_max
    if not f_min - slack <= f_target <= f_max + slack:
        raise TuningRangeError(f_target, f_min, f_max)
    a2 = p.asymmetry**2
    if a2 == 1.0:
        return p.offset_current
    cos2 = ((f_target / p.zero_field_freq) ** 4 - a2) / (1.0 - a2)
    cos2 = min(max(cos2, 0.0), 1.0)
    return p.offset_current + p.half_quantum_current / math.pi * math.acos(math.sqrt(cos2))


def flux_slope(current, p: TransmonParams):
    """Analytic df_q/dI."""
    phase = np.pi * (np.asarray(current, dtype=float) - p.offset_current) / p.half_quantum_current
    a2 = p.asymmetry**2
    inner = a2 + (1.0 - a2) * np.cos(phase) ** 2
    d_inner = -(1.0 - a2) * np.sin(2 * phase) * np.pi / p.half_quantum_current
    out = 0.25 * p.zero_field_freq * inner ** (-0.75) * d_inner
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class CoherenceSet:
    t1: float
    t2_star: float

    def __post_init__(self):
        if not (self.t1 > 0 and self.t2_star > 0):
            raise DomainError("t1 and t2_star must be > 0")
        if self.t2_star > 2 * self.t1:
            raise PhysicalityError(f"T2* = {self.t2_star:g} s exceeds 2 T1 = {2 * self.t1:g} s")


def dephasing_from_coherence(c: CoherenceSet) -> float:
    """Pure dephasing rate (2 pi T_phi)^-1 = (1/T2* - 1/(2 T1)) / (2 pi), in Hz."""
    if c.t2_star > 2 * c.t1:
        raise PhysicalityError(f"T2* = {c.t2_star:g} s exceeds 2 T1 = {2 * c.t1:g} s")
    return (1.0 / c.t2_star - 0.5 / c.t1) / (2 * math.pi)


@dataclass(frozen=True)
class LinewidthBudget:
    total: float
    components: tuple = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return dict(self.components)


def linewidth_budget(components: Union[Mapping[str, float], Iterable[tuple]]) -> LinewidthBudget:
    """Sum independent linewidth contributions, keeping the breakdown."""
    items = list(components.items()) if isinstance(components, Mapping) else list(components)
    for name, rate in items:
        if rate < 0:
            raise DomainError(f"linewidth component {name!r} is negative")
    return LinewidthBudget(math.fsum(r for _, r in items), tuple((n, float(r)) for n, r in items))
