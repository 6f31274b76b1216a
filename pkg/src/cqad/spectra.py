"""Stark-driven qubit spectroscopy: Poisson-weighted Lorentzian combs.

A coherent phonon state with mean ``n_bar`` splits the qubit line into peaks
at ``f_q - 2 chi n`` (one per Fock state ``n``) with full widths
``gamma + kappa (n + n_bar)``.  The optional ``pull_per_phonon`` term moves
every peak by ``pull_per_phonon * n_bar``; it carries the observed upward drift
of the zero-phonon line with drive power.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.signal import find_peaks
from scipy.special import gammaln

from .errors import DomainError

# observed drift of the zero-phonon line per phonon of drive
MEASURED_PULL_PER_PHONON = 150e3


@dataclass(frozen=True)
class NumberSplitParams:
    """Line-shape parameters for one driven mode.

    ``amplitude`` multiplies unit-area Lorentzians, so it carries units of Hz
    when ``values`` are excited-state probabilities.
    """

    qubit_freq: float
    qubit_linewidth: float
    mode_loss: float
    half_shift: float
    n_max: int = 6
    offset: float = 0.0
    amplitude: float = 1.0
    pull_per_phonon: float = 0.0

    def __post_init__(self):
        if not self.qubit_linewidth > 0:
            raise DomainError("qubit_linewidth must be > 0")
        if self.mode_loss < 0:
            raise DomainError("mode_loss must be >= 0")
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise DomainError("n_max must be an integer >= 1")
        if not self.amplitude > 0:
            raise DomainError("amplitude must be > 0")

    @property
    def single_phonon_shift(self) -> float:
        return 2.0 * self.half_shift


@dataclass(frozen=True)
class SpectrumTrace:
    freqs: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        f = np.asarray(self.freqs, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if f.shape != v.shape or f.ndim != 1:
            raise DomainError("freqs and values must be 1-D and of equal length")
        if f.size > 1 and np.any(np.diff(f) <= 0):
            raise DomainError("freqs must be strictly increasing")
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DriveConfig:
    power: float
    conversion: float = 1.0

    def __post_init__(self):
        if self.power < 0:
            raise DomainError("power must be >= 0")
        if not self.conversion > 0:
            raise DomainError("conversion must be > 0")


def poisson_weights(n_bar: float, n_max: int) -> np.ndarray:
    """P_n = exp(-n_bar) n_bar^n / n! for n = 0..n_max, evaluated in log space."""
    if n_bar < 0:
        raise DomainError("mean phonon number must be >= 0")
    n = np.arange(n_max + 1)
    if n_bar == 0:
        return (n == 0).astype(float)
    return np.exp(-n_bar + n * np.log(n_bar) - gammaln(n + 1))


def lorentzian(f, center, width):
    """Unit-area Lorentzian with full width at half maximum ``width``."""
    return width / (2 * np.pi) / ((f - center) ** 2 + 0.25 * width * width)


def peak_centers(p: NumberSplitParams, n_bar: float) -> np.ndarray:
    n = np.arange(p.n_max + 1)
    return p.qubit_freq - 2 * p.half_shift * n + p.pull_per_phonon * n_bar


def peak_widths(p: NumberSplitParams, n_bar: float) -> np.ndarray:
    n = np.arange(p.n_max + 1)
    return p.qubit_linewidth + p.mode_loss * (n + n_bar)


def number_split_values(freqs, p: NumberSplitParams, n_bar: float) -> np.ndarray:
    f = np.asarray(freqs, dtype=float)[..., None]
    w = poisson_weights(n_bar, p.n_max)
    comb = lorentzian(f, peak_centers(p, n_bar), peak_widths(p, n_bar)) @ w
    return p.offset + p.amplitude * comb


def number_split_spectrum(freqs: Sequence[float], p: NumberSplitParams, n_bar: float) -> SpectrumTrace:
    """Excited-state probability P_e(f) for a coherent state of mean ``n_bar`` phonons."""
    f = np.asarray(freqs, dtype=float)
    return SpectrumTrace(f, number_split_values(f, p, n_bar), label=f"nbar={n_bar:g}")


def mean_line_position(p: NumberSplitParams, n_bar: float) -> float:
    """Poisson-weighted mean of the peak centres (first moment of the comb)."""
    w = poisson_weights(n_bar, p.n_max)
    return float(w @ peak_centers(p, n_bar) / w.sum())


def power_to_mean_phonon(d: DriveConfig) -> float:
    return d.conversion * d.power


@dataclass(frozen=True)
class Resolvability:
    resolved: bool
    qubit_margin: float  # 2 chi - gamma
    mode_margin: float  # 2 chi - kappa


def resolvability(chi: float, gamma: float, kappa: float) -> Resolvability:
    """Strong-dispersive test: single-phonon shift 2 chi must beat both linewidths."""
    if chi < 0 or gamma < 0 or kappa < 0:
        raise DomainError("chi, gamma and kappa must be >= 0")
    qm = 2 * chi - gamma
    km = 2 * chi - kappa
    return Resolvability(bool(qm > 0 and km > 0), qm, km)


def local_maxima(trace: SpectrumTrace, min_prominence: float = 0.0) -> np.ndarray:
    """Frequencies of resolved peaks in a trace."""
    idx, _ = find_peaks(trace.values, prominence=min_prominence if min_prominence > 0 else None)
    return trace.freqs[idx]
