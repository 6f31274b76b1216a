"""Split interdigitated transducer: frequency response, coupling, emission, Lamb shift.

The transducer is two identical halves of ``n_periods`` finger periods whose
centres are separated by a travel time ``delay``.  Its Fourier transform about
the symmetry point is the product of a slow sinc envelope and a fast
``sin(pi f tau)`` fringe.  All frequencies and rates are in Hz.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError

_REL_TOL = 1e-6


def sinc(x):
    """Unnormalised sinc, sin(x)/x, with a series branch near the origin."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def _positive_freq(f, name="f"):
    arr = np.asarray(f, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} must be > 0 Hz")
    return arr


def _ret(arr):
    return arr if np.ndim(arr) else float(arr)


class LambVariant(str, enum.Enum):
    AS_WRITTEN = "AsWritten"
    KRAMERS_KRONIG = "KramersKronig"


@dataclass(frozen=True)
class IdtParams:
    """Geometry and strength of the split transducer.

    Lengths are optional; when given they must agree with the timing/frequency
    fields (``delay = separation / sound_speed``, ``center_freq = sound_speed /
    pitch``, ``half_length = n_periods * pitch``).
    """

    n_periods: int
    center_freq: float
    delay: float
    max_emission: float
    max_coupling: float
    sound_speed: float = 2880.0
    pitch: Optional[float] = None
    half_length: Optional[float] = None
    separation: Optional[float] = None

    def __post_init__(self):
        if int(self.n_periods) != self.n_periods or self.n_periods < 1:
            raise DomainError("n_periods must be an integer >= 1")
        if not self.center_freq > 0 or not self.delay > 0 or not self.sound_speed > 0:
            raise DomainError("center_freq, delay and sound_speed must be > 0")
        if not self.max_emission > 0 or not self.max_coupling > 0:
            raise DomainError("max_emission and max_coupling must be > 0")
        if self.separation is not None:
            implied = self.separation / self.sound_speed
            if abs(self.delay - implied) / self.delay >= _REL_TOL:
                raise DomainError(
                    f"delay {self.delay:.6e} s inconsistent with separation/sound_speed {implied:.6e} s"
                )
        if self.pitch is not None:
            implied = self.sound_speed / self.pitch
            if abs(self.center_freq - implied) / self.center_freq >= _REL_TOL:
                raise DomainError(
                    f"center_freq {self.center_freq:.6e} Hz inconsistent with sound_speed/pitch {implied:.6e} Hz"
                )
            if self.half_length is not None:
                implied = self.n_periods * self.pitch
                if abs(self.half_length - implied) / self.half_length >= _REL_TOL:
                    raise DomainError("half_length inconsistent with n_periods * pitch")

    @property
    def envelope_length(self) -> float:
        """Length D of one transducer half, derived if not given explicitly."""
        if self.half_length is not None:
            return self.half_length
        if self.pitch is not None:
            return self.n_periods * self.pitch
        return self.n_periods * self.sound_speed / self.center_freq


@dataclass(frozen=True)
class QubitEnvironment:
    q_internal: float
    lamb_variant: LambVariant = LambVariant.KRAMERS_KRONIG

    def __post_init__(self):
        if not self.q_internal > 0:
            raise DomainError("q_internal must be > 0")
        object.__setattr__(self, "lamb_variant", LambVariant(self.lamb_variant))


def response_amplitude(f, p: IdtParams):
    """A(f) = sinc[pi (f - f_c) D / v] * sin(pi f tau); real and within [-1, 1]."""
    f = _positive_freq(f)
    env = sinc(np.pi * (f - p.center_freq) * p.envelope_length / p.sound_speed)
    return _ret(env * np.sin(np.pi * f * p.delay))


def coupling_strength(f_m, p: IdtParams, parity_factor=1.0):
    """Qubit-mode coupling g_m = g0 * A(f_m) * parity_factor, full envelope kept."""
    pf = np.asarray(parity_factor, dtype=float)
    if np.any((pf < 0) | (pf > 1)):
        raise DomainError("parity_factor must lie in [0, 1]")
    return _ret(p.max_coupling * np.asarray(response_amplitude(f_m, p)) * pf)


def coupling_slope_at_zero(p: IdtParams) -> float:
    # |g0 * dA/df| at a fringe zero, with the envelope taken as unity
    return math.pi * p.max_coupling * p.delay


def _emission_envelope(f, p: IdtParams):
    return sinc(np.pi * p.n_periods * (f - p.center_freq) / p.center_freq) ** 2


def emission_rate(f_q, p: IdtParams, env: QubitEnvironment):
    """Qubit energy loss rate Gamma_1(f_q): internal loss plus phonon emission.

    ``Gamma_1 = f_q / Q_i + (Gamma_0 / 2) sinc^2[pi N_q (f_q - f_c) / f_c] (1 - cos 2 pi f_q tau)``
    """
    f = _positive_freq(f_q, "f_q")
    phonon = 0.5 * p.max_emission * _emission_envelope(f, p) * (1.0 - np.cos(2 * np.pi * f * p.delay))
    return _ret(f / env.q_internal + phonon)


def phonon_emission_rate(f_q, p: IdtParams):
    """Phonon part of the loss rate alone, Gamma_0 sinc^2 sin^2(pi f tau)."""
    f = _positive_freq(f_q, "f_q")
    return _ret(p.max_emission * _emission_envelope(f, p) * np.sin(np.pi * f * p.delay) ** 2)


def lamb_shift_envelope(f_q, p: IdtParams):
    f = _positive_freq(f_q, "f_q")
    return _ret(0.25 * p.max_emission * _emission_envelope(f, p))


def lamb_shift(f_q, p: IdtParams, env: QubitEnvironment):
    """Phononic Lamb shift of the qubit frequency.

    The ``KramersKronig`` variant oscillates as ``sin(2 pi f tau)``, the reactive
    partner of the ``sin^2(pi f tau)`` emission; ``AsWritten`` uses
    ``sin(pi f tau)`` with twice the period.
    """
    f = _positive_freq(f_q, "f_q")
    phase = np.pi * f * p.delay
    if env.lamb_variant is LambVariant.KRAMERS_KRONIG:
        phase = 2.0 * phase
    return _ret(0.25 * p.max_emission * _emission_envelope(f, p) * np.sin(phase))


def giant_atom_parameter(p: IdtParams) -> float:
    """pi * tau * Gamma_0; the giant-atom regime sets in as this approaches 1."""
    return math.pi * p.delay * p.max_emission
