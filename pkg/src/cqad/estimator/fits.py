"""The four fits of the experiment, each a thin wrapper around ``least_squares_fit``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..bragg_cavity import ModeTable
from ..errors import ContractError
from ..multimode_jc import SystemModel
from ..phonon_idt import IdtParams, QubitEnvironment
from ..spectra import NumberSplitParams, SpectrumTrace, local_maxima
from . import models
from .lsq import FitProblem, FitResult, least_squares_fit
from .synth import SyntheticDataset

TAU_SCAN = (1e-9, 20e-9)
TAU_SCAN_STEP = 2e-12


# -- linear --------------------------------------------------------------------

@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float
    result: FitResult


def fit_linear(x, y) -> LinearFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ContractError("a line needs at least two points")
    span = max(np.ptp(y), abs(y).max(), 1.0)
    xspan = max(np.ptp(x), 1e-300)
    slope_bound = 1e3 * span / xspan
    lo_i = -1e3 * span - slope_bound * abs(x).max()
    problem = FitProblem(
        models.LINEAR, x, y, 1.0, [0.0, 0.0],
        [(-slope_bound, slope_bound), (lo_i, -lo_i)],
    )
    res = least_squares_fit(problem)
    slope, intercept = res.params
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(float(slope), float(intercept), r2, res)


# -- flux curve ----------------------------------------------------------------

def flux_initial_guess(current, freq) -> np.ndarray:
    current = np.asarray(current, dtype=float)
    freq = np.asarray(freq, dtype=float)
    i_max = current[np.argmax(freq)]
    i_min = current[np.argmin(freq)]
    f0 = float(freq.max())
    a = min(max(float(freq.min() / f0) ** 2, 1e-3), 0.999)
    ic = max(2 * abs(i_min - i_max), 1e-12)
    return np.array([f0, a, ic, i_max])


def fit_flux_curve(data: SyntheticDataset, init=None, mask=None, sigma=None) -> FitResult:
    """Recover (f0, a, Ic, I0) from qubit frequency vs coil current."""
    x, y = data.x, data.y_noisy
    p0 = flux_initial_guess(x, y) if init is None else np.asarray(init, dtype=float)
    f0, a, ic, i0 = p0
    bounds = [(0.5 * f0, 2 * f0), (0.0, 1.0), (0.5 * ic, 2 * ic), (i0 - 0.5 * ic, i0 + 0.5 * ic)]
    if sigma is None:
        sigma = data.noise_sigma if data.noise_sigma > 0 else 1.0
    problem = FitProblem(models.FLUX, x, y, sigma, p0, bounds, mask=mask)
    return least_squares_fit(problem)


# -- T1 curve ------------------------------------------------------------------

@dataclass(frozen=True)
class T1Fit:
    q_internal: float
    max_emission: float
    center_freq: float
    delay: float
    result: FitResult
    tau_seed: float
    qi_relative_uncertainty: float
    qi_poorly_constrained: bool

    def idt(self, n_periods: int = 8, max_coupling: float = 5.1e6) -> IdtParams:
        return IdtParams(n_periods, self.center_freq, self.delay, self.max_emission, max_coupling)

    def environment(self) -> QubitEnvironment:
        return QubitEnvironment(self.q_internal)


def scan_delay(freq, rate, tau_range=TAU_SCAN, step=TAU_SCAN_STEP) -> float:
    """Delay whose fringe pattern sin^2(pi f tau) best correlates with the loss rate.

    The least-squares landscape in tau has a local minimum at every fringe
    alias, so tau is seeded by an exhaustive scan instead of a local search.
    """
    f = np.asarray(freq, dtype=float)
    y = np.asarray(rate, dtype=float)
    # remove the slow envelope so only the fringe oscillation is correlated
    t = (f - f.mean()) / (np.ptp(f) or 1.0)
    q, _ = np.linalg.qr(np.vander(t, 4))
    y = y - q @ (q.T @ y)
    y /= np.linalg.norm(y) or 1.0
    taus = np.arange(tau_range[0], tau_range[1] + step / 2, step)
    best_tau, best = taus[0], -np.inf
    for chunk in np.array_split(taus, max(1, taus.size // 500)):
        basis = np.sin(np.pi * np.outer(chunk, f)) ** 2
        basis -= (basis @ q) @ q.T
        norms = np.linalg.norm(basis, axis=1)
        corr = (basis @ y) / np.where(norms > 0, norms, 1.0)
        k = int(np.argmax(corr))
        if corr[k] > best:
            best, best_tau = corr[k], chunk[k]
    return float(best_tau)


def fit_t1_curve(
    data: SyntheticDataset,
    n_periods: int = 8,
    mask=None,
    qi_flag_threshold: float = 0.1,
) -> T1Fit:
    """Recover (Q_i, Gamma_0, f_c, tau) from loss rate vs qubit frequency.

    Points are weighted by their own magnitude, matching relative (log-normal)
    measurement error on decay rates.
    """
    f = np.asarray(data.x, dtype=float)
    y = np.asarray(data.y_noisy, dtype=float)
    keep = np.ones(f.size, bool) if mask is None else ~np.asarray(mask, bool)
    fk, yk = f[keep], y[keep]
    tau0 = scan_delay(fk, yk)
    if np.ptp(fk) * tau0 < 3:
        raise ContractError("loss-rate data must span at least three interference periods")
    floor = float(np.min(yk))
    q0 = float(np.median(fk)) / floor
    gamma0 = float(np.max(yk) - floor)
    excess = np.clip(yk - floor, 0, None)
    fc0 = float(np.sum(fk * excess) / np.sum(excess))
    p0 = np.array([q0, gamma0, fc0, tau0])
    half_span = 0.5 * np.ptp(fk)
    bounds = [
        (q0 / 20, q0 * 20),
        (gamma0 / 5, gamma0 * 5),
        (fc0 - 2 * half_span, fc0 + 2 * half_span),
        (tau0 * 0.97, tau0 * 1.03),
    ]
    problem = FitProblem(models.T1, f, y, y, p0, bounds, mask=mask, context=models.T1Context(n_periods))
    res = least_squares_fit(problem, allow_degenerate=True)
    q_i, g0, fc, tau = res.params
    rel = float(res.stderr[0] / q_i) if 0 not in res.degenerate else math.inf
    return T1Fit(float(q_i), float(g0), float(fc), float(tau), res, tau0, rel, bool(rel > qi_flag_threshold))


# -- avoided crossings ---------------------------------------------------------

@dataclass(frozen=True)
class CrossingFit:
    modes: ModeTable
    result: FitResult

    @property
    def coupling_stderr(self) -> np.ndarray:
        m = len(self.modes)
        return self.result.stderr[m:]


def fit_crossings(peaks: Sequence, skeleton: SystemModel, sigma: float = 1e3) -> CrossingFit:
    """Fit mode frequencies and couplings to branch frequencies measured vs current.

    ``peaks`` is a list of ``(current, branch_freqs)`` with every branch of the
    single-excitation spectrum listed; ``skeleton`` fixes the transmon and
    provides the starting mode table.
    """
    modes = skeleton.modes
    m = len(modes)
    currents, ys = [], []
    for current, branch in peaks:
        branch = np.sort(np.asarray(branch, dtype=float))
        if branch.size != m + 1:
            raise ContractError(f"expected {m + 1} branch frequencies per current, got {branch.size}")
        currents.append(float(current))
        ys.append(branch)
    x = np.repeat(np.asarray(currents), m + 1)
    y = np.concatenate(ys)
    p0 = models.crossing_vector(modes)
    f = modes.freqs
    gaps = np.diff(f)
    near = np.minimum(np.concatenate([[np.inf], gaps]), np.concatenate([gaps, [np.inf]]))
    # wide enough to escape a 1 MHz misplaced start even between close neighbours
    df = np.clip(0.45 * near, 2e6, 5e6)
    g = p0[m:]
    bounds = [(fi - d, fi + d) for fi, d in zip(f, df)] + [(0.0, max(3 * gi, 2e6)) for gi in g]
    ctx = models.CrossingContext(skeleton.transmon, m)
    res = least_squares_fit(FitProblem(models.CROSSINGS, x, y, sigma, p0, bounds, context=ctx), allow_degenerate=True)
    fitted = modes.replace_values(freqs=res.params[:m], couplings=np.abs(res.params[m:]))
    return CrossingFit(fitted, res)


def crossing_peaks(spectrum) -> list:
    """Turn a :class:`CrossingSpectrum` into the ``(current, branches)`` list ``fit_crossings`` reads."""
    return [(float(i), row.copy()) for i, row in zip(spectrum.currents, spectrum.branches)]


# -- number splitting ----------------------------------------------------------

@dataclass(frozen=True)
class NumberSplitFit:
    shared: NumberSplitParams
    nbar: np.ndarray
    offsets: np.ndarray
    amplitudes: np.ndarray
    result: FitResult
    chi_identifiable: bool


def _fwhm(trace: SpectrumTrace, base: float) -> float:
    v = trace.values - base
    half = 0.5 * v.max()
    above = trace.freqs[v >= half]
    return float(above.max() - above.min()) if above.size > 1 else float(np.ptp(trace.freqs) / 20)


def fit_number_splitting(
    traces: Sequence[SpectrumTrace],
    n_max: int = 6,
    pull_per_phonon: float = 0.0,
    sigma: Optional[float] = None,
) -> NumberSplitFit:
    """Joint fit: shared (f_q, gamma, kappa, chi) and per-trace (n_bar, C0, C1).

    Several traces at different drive powers are needed to pin chi robustly;
    a single trace is accepted and an unidentifiable chi is reported through
    ``chi_identifiable`` rather than raised.
    """
    if len(traces) < 1:
        raise ContractError("at least one trace is required")
    k = len(traces)
    x = np.concatenate([t.freqs for t in traces])
    y = np.concatenate([t.values for t in traces])
    idx = np.concatenate([np.full(t.freqs.size, i) for i, t in enumerate(traces)])

    base = [float(np.min(t.values)) for t in traces]
    tallest = int(np.argmax([t.values.max() - b for t, b in zip(traces, base)]))
    ref = traces[tallest]
    fq0 = float(ref.freqs[np.argmax(ref.values)])
    gamma0 = _fwhm(ref, base[tallest])
    two_chi0 = gamma0
    for t, b in zip(traces, base):
        pk = local_maxima(t, min_prominence=0.05 * (t.values.max() - b))
        if pk.size > 1:
            two_chi0 = float(np.median(np.diff(pk)))
            break
    chi0 = 0.5 * two_chi0
    p0 = [fq0, gamma0, 0.5 * gamma0, chi0]
    bounds = [(fq0 - 3 * gamma0, fq0 + 3 * gamma0), (gamma0 / 10, 5 * gamma0), (0.0, 5 * gamma0), (0.0, 10 * chi0)]
    for t, b in zip(traces, base):
        area = float(np.trapezoid(t.values - b, t.freqs))
        area = max(area, 1e-12)
        centroid = float(np.trapezoid((t.values - b) * t.freqs, t.freqs) / area)
        nbar0 = min(max((fq0 - centroid) / two_chi0, 0.05), 15.0)
        span = max(np.ptp(t.values), 1e-12)
        p0 += [nbar0, b, area]
        bounds += [(0.0, 20.0), (b - 10 * span, b + 10 * span), (area / 10, area * 10)]
    if sigma is None:
        sigma = 1.0
    ctx = models.NumberSplitContext(idx, k, n_max, pull_per_phonon)
    res = least_squares_fit(FitProblem(models.NUMBER_SPLIT, x, y, sigma, p0, bounds, context=ctx), allow_degenerate=True)
    p = res.params
    chi_rel = res.stderr[3] / p[3] if 3 not in res.degenerate and p[3] > 0 else math.inf
    shared = NumberSplitParams(p[0], p[1], p[2], p[3], n_max, 0.0, 1.0, pull_per_phonon)
    per = p[4:].reshape(k, 3)
    return NumberSplitFit(shared, per[:, 0].copy(), per[:, 1].copy(), per[:, 2].copy(), res, bool(chi_rel < 0.5))
