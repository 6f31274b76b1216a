"""Multimode Jaynes-Cummings model: avoided-crossing spectra and dispersive shifts."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from .bragg_cavity import ModeTable
from .errors import ContractError, CutoffError, DispersiveRegimeError, PoleError
from .transmon import TransmonParams, freq_vs_current

DISPERSIVE_ERROR_RATIO = 3.0
DISPERSIVE_WARN_RATIO = 8.0


@dataclass(frozen=True)
class SystemModel:
    transmon: TransmonParams
    modes: ModeTable

    def __post_init__(self):
        if not np.all(np.isfinite(self.modes.couplings)):
            raise ContractError("mode couplings must be finite")
        f = self.modes.freqs
        if np.unique(f).size != f.size:
            raise ContractError("mode frequencies must be distinct")


@dataclass(frozen=True)
class CrossingSpectrum:
    currents: np.ndarray
    branches: np.ndarray  # (n_currents, n_modes + 1), each row ascending

    def columns(self):
        return ("current_a",) + tuple(f"branch_{i}" for i in range(self.branches.shape[1]))

    def rows(self):
        return [(i, *row) for i, row in zip(self.currents, self.branches)]


@dataclass(frozen=True)
class DispersiveShift:
    chi: float
    detuning: float  # f_q - f_m
    coupling: float

    @property
    def single_phonon_shift(self) -> float:
        return 2.0 * self.chi


def build_single_excitation_matrix(f_q, modes: ModeTable) -> np.ndarray:
    """Arrowhead matrix: mode frequencies on the diagonal, f_q last, couplings in the last row/column.

    ``f_q`` may be an array, in which case a stack of matrices is returned.
    """
    if len(modes) < 1:
        raise ContractError("at least one mode is required")
    fm = modes.freqs
    g = modes.couplings
    return _arrowhead(np.asarray(f_q, dtype=float), fm, g)


def _arrowhead(f_q, fm, g):
    n = fm.size
    h = np.zeros(np.shape(f_q) + (n + 1, n + 1))
    idx = np.arange(n)
    h[..., idx, idx] = fm
    h[..., n, n] = f_q
    h[..., idx, n] = g
    h[..., n, idx] = g
    return h


def _eigvalsh_shifted(h):
    # diagonalise about the mean diagonal to keep relative precision at GHz offsets
    n = h.shape[-1]
    ref = np.trace(h, axis1=-2, axis2=-1) / n
    eye = np.eye(n)
    shifted = h - ref[..., None, None] * eye
    return np.linalg.eigvalsh(shifted) + ref[..., None]


def eigenfrequencies(matrix) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix (or stack of them)."""
    h = np.asarray(matrix, dtype=float)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise ContractError("matrix must be square")
    scale = max(float(np.max(np.abs(h))), 1.0)
    if np.max(np.abs(h - np.swapaxes(h, -1, -2))) > 1e-12 * scale:
        raise ContractError("matrix is not symmetric")
    return _eigvalsh_shifted(h)


def crossing_spectrum(currents: Sequence[float], model: SystemModel) -> CrossingSpectrum:
    currents = np.asarray(currents, dtype=float)
    if currents.ndim != 1 or currents.size == 0:
        raise ContractError("currents must be a non-empty 1-D list")
    f_q = freq_vs_current(currents, model.transmon)
    h = build_single_excitation_matrix(np.atleast_1d(f_q), model.modes)
    return CrossingSpectrum(currents, _eigvalsh_shifted(h))


def crossing_gaps(spectrum: CrossingSpectrum) -> np.ndarray:
    """Smallest separation between branches j and j+1 over the sweep, for each mode j.

    For a qubit sweeping through well-separated modes this is the avoided
    crossing gap 2 g_j at mode j.
    """
    b = spectrum.branches
    return np.min(np.diff(b, axis=1), axis=0)


def dispersive_shift_perturbative(g, delta, alpha):
    """chi = g^2 (1/Delta - 1/(Delta + alpha)); a phonon shifts the qubit by 2 chi."""
    g = np.asarray(g, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(delta == 0) or np.any(delta + alpha == 0):
        raise PoleError("dispersive shift has a pole at Delta = 0 or Delta = -alpha")
    chi = g * g * (1.0 / delta - 1.0 / (delta + alpha))
    return chi if np.ndim(chi) else float(chi)


def dispersive_shift_numeric(g: float, delta: float, alpha: float, transmon_levels: int = 3, fock_cutoff: int = 15) -> float:
    """Exact chi from a truncated multilevel-transmon x single-mode Hamiltonian.

    Works in the frame rotating at the mode frequency, where transmon level j
    sits at ``j*delta + alpha*j*(j-1)/2``.  Dressed states are labelled by
    maximal overlap with the bare |g,0>, |g,1>, |e,0>, |e,1> states.
    """
    if transmon_levels < 3:
        raise ContractError("transmon_levels must be >= 3")
    if fock_cutoff < 10:
        raise ContractError("fock_cutoff must be >= 10")
    nj, nn = transmon_levels, fock_cutoff
    j = np.repeat(np.arange(nj), nn)
    n = np.tile(np.arange(nn), nj)
    bare = j * delta + alpha * j * (j - 1) / 2.0
    h = np.diag(bare.astype(float))
    for jj in range(nj - 1):
        for nn_ in range(1, nn):
            a = jj * nn + nn_  # |j, n>
            b = (jj + 1) * nn + nn_ - 1  # |j+1, n-1>
            h[a, b] = h[b, a] = g * math.sqrt(jj + 1) * math.sqrt(nn_)
    evals, evecs = np.linalg.eigh(h)

    labels = [(0, 0), (0, 1), (1, 0), (1, 1)]
    order = sorted(labels, key=lambda lab: (bare[lab[0] * nn + lab[1]], lab))
    taken = set()
    energy = {}
    for lab in order:
        overlap = evecs[lab[0] * nn + lab[1], :] ** 2
        for k in np.argsort(-overlap, kind="stable"):
            if k not in taken:
                taken.add(int(k))
                energy[lab] = evals[k]
                top = evecs[n == nn - 1, k]
                if np.sum(top**2) > 1e-6:
                    raise CutoffError(f"Fock cutoff {nn} too small: top level population {np.sum(top**2):.2e}")
                break
    return 0.5 * (energy[(1, 1)] - energy[(1, 0)] - energy[(0, 1)] + energy[(0, 0)])


def total_stark_hamiltonian_shifts(model: SystemModel, f_q: float) -> list:
    """Per-mode dispersive shifts at qubit frequency ``f_q``.

    Raises :class:`DispersiveRegimeError` for any mode with |Delta|/g < 3 and
    warns below 8.
    """
    alpha = model.transmon.anharmonicity
    out = []
    for i, m in enumerate(model.modes):
        delta = f_q - m.freq
        g = m.coupling
        ratio = math.inf if g == 0 else abs(delta) / abs(g)
        if ratio < DISPERSIVE_ERROR_RATIO:
            raise DispersiveRegimeError(i, ratio)
        if ratio < DISPERSIVE_WARN_RATIO:
            warnings.warn(f"mode {i} only weakly dispersive: |Delta|/g = {ratio:.2f}", RuntimeWarning)
        out.append(DispersiveShift(dispersive_shift_perturbative(g, delta, alpha), delta, g))
    return out


def solve_detuning(two_chi: float, ratio: float, alpha: float, n_scan: int = 20000) -> tuple[float, float]:
    """Detuning and coupling that give single-phonon shift ``two_chi`` at ``Delta/g = ratio``.

    Brute-force scan over the straddling window 0 < Delta < -alpha, then bisection.
    """
    def excess(delta):
        return 2 * dispersive_shift_perturbative(delta / ratio, delta, alpha) - two_chi

    grid = np.linspace(0, -alpha, n_scan + 1)[1:-1]
    vals = np.array([excess(d) for d in grid])
    idx = np.nonzero(np.diff(np.sign(vals)) != 0)[0]
    if idx.size == 0:
        raise ContractError("no detuning in (0, -alpha) reproduces the requested shift")
    i = int(idx[0])
    delta = bisect(excess, grid[i], grid[i + 1], xtol=1e-6)
    return delta, delta / ratio
