"""Distributed Bragg mirrors and the acoustic mode ladder they confine.

Each mirror is a uniform array of identical, lossless point reflectors placed
every half grating period (``pitch / 2``), so the first-order Bragg frequency
is ``sound_speed / pitch``.  Seen from the cavity, every element reflects with
amplitude ``-r_s`` (phase pi) and transmits ``sqrt(1 - r_s**2)``.

Phase convention: waves travel as ``exp(j(wt - kx))``, so the reflection phase
of a distributed mirror *decreases* with frequency and penetration into the
mirror lengthens the cavity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from .errors import ContractError, DomainError

SCAN_STEP = 0.1e6
ROOT_XTOL = 1.0


@dataclass(frozen=True)
class MirrorParams:
    n_strips: int
    strip_reflectivity: float
    pitch: float
    sound_speed: float = 2880.0

    def __post_init__(self):
        if int(self.n_strips) != self.n_strips or self.n_strips < 1:
            raise DomainError("n_strips must be an integer >= 1")
        if not 0 <= self.strip_reflectivity < 1:
            raise DomainError("strip_reflectivity must lie in [0, 1)")
        if not self.pitch > 0 or not self.sound_speed > 0:
            raise DomainError("pitch and sound_speed must be > 0")

    @property
    def bragg_freq(self) -> float:
        return self.sound_speed / self.pitch

    @property
    def element_spacing(self) -> float:
        return 0.5 * self.pitch


@dataclass(frozen=True)
class CavitySpec:
    mirror_separation: float
    mirrors: MirrorParams
    sound_speed: float = 2880.0

    def __post_init__(self):
        if not self.mirror_separation > 0:
            raise DomainError("mirror_separation must be > 0")


@dataclass(frozen=True)
class Mode:
    freq: float
    longitudinal_index: int
    parity: str = "even"
    transverse: bool = False
    loss: float = 250e3
    coupling: float = 0.0

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ContractError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if not self.freq > 0:
            raise DomainError("mode frequency must be > 0")
        if self.loss < 0:
            raise DomainError("mode loss must be >= 0")


@dataclass(frozen=True)
class ModeTable:
    """Immutable list of confined modes, kept sorted by frequency."""

    modes: tuple = ()

    def __post_init__(self):
        modes = tuple(sorted(self.modes, key=lambda m: (m.freq, m.transverse)))
        object.__setattr__(self, "modes", modes)
        longi = [m for m in modes if not m.transverse]
        longi.sort(key=lambda m: m.longitudinal_index)
        for a, b in zip(longi, longi[1:]):
            if not b.freq > a.freq:
                raise ContractError("longitudinal mode frequencies must increase with index")
            if b.longitudinal_index == a.longitudinal_index + 1 and a.parity == b.parity:
                raise ContractError("parity must alternate between consecutive longitudinal modes")

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, i):
        return self.modes[i]

    @property
    def freqs(self) -> np.ndarray:
        return np.array([m.freq for m in self.modes])

    @property
    def couplings(self) -> np.ndarray:
        return np.array([m.coupling for m in self.modes])

    @property
    def losses(self) -> np.ndarray:
        return np.array([m.loss for m in self.modes])

    def longitudinal(self) -> "ModeTable":
        return ModeTable(tuple(m for m in self.modes if not m.transverse))

    def replace_values(self, freqs=None, couplings=None) -> "ModeTable":
        """Copy with new frequencies and/or couplings (same order as ``self.modes``)."""
        freqs = self.freqs if freqs is None else freqs
        couplings = self.couplings if couplings is None else couplings
        return ModeTable(
            tuple(
                replace(m, freq=float(f), coupling=float(g))
                for m, f, g in zip(self.modes, freqs, couplings)
            )
        )

    def rows(self):
        """Rows for the ``index, freq_hz, parity, transverse, kappa_hz, g_hz`` CSV."""
        return [
            (m.longitudinal_index, m.freq, m.parity, int(m.transverse), m.loss, m.coupling)
            for m in self.modes
        ]

    CSV_COLUMNS = ("index", "freq_hz", "parity", "transverse", "kappa_hz", "g_hz")


def _element_matrix(m: MirrorParams) -> np.ndarray:
    r_s = m.strip_reflectivity
    t = math.sqrt(1.0 - r_s * r_s)
    r11, r22 = -r_s, r_s
    # maps (forward, backward) amplitudes right of the element to those on its left
    return np.array([[1.0, -r22], [r11, t * t - r11 * r22]], dtype=complex) / t


def mirror_scattering(f, m: MirrorParams):
    """Reflection and transmission of the whole mirror, referenced to its first element.

    Returns ``(r, t)`` as complex arrays (or scalars for scalar ``f``).
    """
    f = np.asarray(f, dtype=float)
    if np.any(~(f > 0)):
        raise DomainError("frequency must be > 0 Hz")
    kd = 2 * np.pi * f / m.sound_speed * m.element_spacing
    prop = np.zeros(f.shape + (2, 2), dtype=complex)
    prop[..., 0, 0] = np.exp(1j * kd)
    prop[..., 1, 1] = np.exp(-1j * kd)
    elem = _element_matrix(m)
    cell = prop @ elem
    total = elem @ np.linalg.matrix_power(cell, m.n_strips - 1)
    r = total[..., 1, 0] / total[..., 0, 0]
    t = 1.0 / total[..., 0, 0]
    if f.ndim == 0:
        return complex(r), complex(t)
    return r, t


def mirror_reflection(f, m: MirrorParams):
    return mirror_scattering(f, m)[0]


def penetration_depth(f, m: MirrorParams, df: float = 1e3) -> float:
    """Group-delay penetration length, ``-(d arg r / dk) / 2``, at frequency f."""
    r_lo = mirror_reflection(f - df, m)
    r_hi = mirror_reflection(f + df, m)
    dphi = np.angle(r_hi / r_lo)
    dk = 2 * np.pi * 2 * df / m.sound_speed
    return float(-dphi / dk / 2.0)


@dataclass(frozen=True)
class Stopband:
    f_lo: float
    f_hi: float
    peak_freq: float
    peak_reflectivity: float

    @property
    def width(self) -> float:
        return self.f_hi - self.f_lo

    @property
    def center(self) -> float:
        return 0.5 * (self.f_lo + self.f_hi)


def stopband(m: MirrorParams, threshold: float = 0.9, min_reflectivity: float = 0.5) -> Optional[Stopband]:
    """Contiguous band around the Bragg frequency where |r| >= threshold * max|r|.

    Returns ``None`` when the mirror never reflects more than
    ``min_reflectivity`` in amplitude, i.e. it has no usable stopband.
    """
    if not 0 < threshold <= 1:
        raise DomainError("threshold must lie in (0, 1]")
    f_b = m.bragg_freq
    # weak-grating estimate of the full width, used only to size the scan
    est = max(2 * f_b * math.asin(max(m.strip_reflectivity, 1e-6)) / math.pi, 1e6)
    span = 3 * est
    n = int(min(max(4000, span / 5e3), 200000))
    grid = np.linspace(f_b - span, f_b + span, 2 * (n // 2) + 1)
    mag = np.abs(mirror_reflection(grid, m))
    i_pk = int(np.argmax(mag))
    r_max = float(mag[i_pk])
    if r_max < min_reflectivity:
        return None
    level = threshold * r_max
    if threshold == 1:
        return Stopband(float(grid[i_pk]), float(grid[i_pk]), float(grid[i_pk]), r_max)

    def excess(f):
        return abs(mirror_reflection(f, m)) - level

    lo = i_pk
    while lo > 0 and mag[lo - 1] >= level:
        lo -= 1
    hi = i_pk
    while hi < len(grid) - 1 and mag[hi + 1] >= level:
        hi += 1
    f_lo = grid[lo] if lo == 0 else bisect(excess, grid[lo - 1], grid[lo], xtol=ROOT_XTOL)
    f_hi = grid[hi] if hi == len(grid) - 1 else bisect(excess, grid[hi], grid[hi + 1], xtol=ROOT_XTOL)
    return Stopband(float(f_lo), float(f_hi), float(grid[i_pk]), r_max)


def _round_trip_phase(f, c: CavitySpec):
    # wrapped angle of r^2 exp(-2jkL); zero at a resonance
    r = mirror_reflection(f, c.mirrors)
    k = 2 * np.pi * np.asarray(f) / c.sound_speed
    return np.angle(r * r * np.exp(-2j * k * c.mirror_separation))


def mode_parity(f: float, c: CavitySpec) -> str:
    """Spatial symmetry about the cavity centre of the standing wave at ``f``."""
    r = mirror_reflection(f, c.mirrors)
    k = 2 * math.pi * f / c.sound_speed
    return "even" if (r * np.exp(-1j * k * c.mirror_separation)).real > 0 else "odd"


def resonance_frequencies(
    c: CavitySpec,
    band: Optional[Sequence[float]] = None,
    scan_step: float = SCAN_STEP,
    loss: float = 250e3,
) -> ModeTable:
    """Longitudinal modes inside ``band`` (default: the 0.9 stopband).

    Solves ``2 k L - 2 arg r(f) = 2 pi m`` by bisection on brackets found on a
    ``scan_step`` grid, refined to 1 Hz.  Couplings are left at zero.
    """
    if band is None:
        sb = stopband(c.mirrors)
        if sb is None:
            return ModeTable()
        band = (sb.f_lo, sb.f_hi)
    f_lo, f_hi = float(band[0]), float(band[1])
    if not f_hi > f_lo > 0:
        raise DomainError("band must satisfy 0 < f_lo < f_hi")
    n = max(int(math.ceil((f_hi - f_lo) / scan_step)), 1)
    grid = np.linspace(f_lo, f_hi, n + 1)
    phase = _round_trip_phase(grid, c)
    k = 2 * np.pi * grid / c.sound_speed
    r = mirror_reflection(grid, c.mirrors)
    cumulative = (2 * k * c.mirror_separation - 2 * np.unwrap(np.angle(r))) / (2 * np.pi)

    modes = []
    for i in range(n):
        a, b = phase[i], phase[i + 1]
        if a == 0.0:
            root = grid[i]
        elif a > 0 > b and a - b < np.pi:
            root = bisect(lambda f: float(_round_trip_phase(f, c)), grid[i], grid[i + 1], xtol=ROOT_XTOL)
        else:
            continue
        index = int(round(0.5 * (cumulative[i] + cumulative[i + 1])))
        modes.append(Mode(float(root), index, mode_parity(root, c), False, loss, 0.0))
    return ModeTable(tuple(modes))


def mode_spacings(t: ModeTable) -> np.ndarray:
    """Gaps between consecutive longitudinal modes; empty for fewer than two."""
    f = np.array([m.freq for m in t.longitudinal().modes])
    if f.size < 2:
        return np.array([])
    return np.diff(f)


def effective_length(c: CavitySpec, f: float) -> float:
    """Cavity length including penetration into both mirrors at ``f``."""
    return c.mirror_separation + 2 * penetration_depth(f, c.mirrors)


def populate_couplings(table: ModeTable, coupling_fn, odd_factor: float, transverse_factor: float = 0.2) -> ModeTable:
    """Fill couplings from ``coupling_fn(freq, parity_factor)``.

    Even longitudinal modes get factor 1, odd ones ``odd_factor`` and transverse
    modes ``transverse_factor``.
    """
    modes = []
    for m in table:
        if m.transverse:
            pf = transverse_factor
        else:
            pf = 1.0 if m.parity == "even" else odd_factor
        modes.append(replace(m, coupling=float(coupling_fn(m.freq, pf))))
    return ModeTable(tuple(modes))
