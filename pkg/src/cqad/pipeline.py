"""Artifact generators shared by the command line and the determinism check.

Every generator takes a parsed :class:`Config`, a seed and an output
directory, writes CSV (and optionally SVG) files and returns their paths.
Randomness is drawn per dataset from ``(seed, dataset_index)`` so adding a
dataset never changes the noise on another.
"""
from __future__ import annotations

from pathlib import Path
from typing import List

import numpy as np

from .bragg_cavity import ModeTable, mode_spacings, mirror_reflection, populate_couplings, resonance_frequencies, stopband
from .config import Config
from .errors import ConfigError
from .estimator.synth import derive_rng
from .multimode_jc import CrossingSpectrum, SystemModel, crossing_spectrum
from .output import write_csv, write_svg
from .phonon_idt import coupling_strength, emission_rate, lamb_shift, response_amplitude
from .spectra import DriveConfig, SpectrumTrace, number_split_spectrum, power_to_mean_phonon
from .transmon import current_for_freq

# dataset indices for derive_rng
NUMBERSPLIT_STREAM = 4
CROSSING_STREAM = 11

GAMMA1_COLUMNS = ("freq_hz", "gamma1_hz", "lamb_shift_hz")
AMPLITUDE_COLUMNS = ("freq_hz", "amplitude")
STOPBAND_COLUMNS = ("f_lo_hz", "f_hi_hz", "width_hz", "peak_freq_hz", "peak_reflectivity")
NUMBERSPLIT_COLUMNS = ("trace_id", "power", "nbar", "freq_hz", "p_e")


def frequency_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive grid; built from an integer count so the endpoint never drifts."""
    if not step > 0 or stop < start:
        raise ConfigError("frequency grid needs step > 0 and stop >= start")
    n = int(round((stop - start) / step)) + 1
    return start + step * np.arange(n)


def idt_response(cfg: Config, out: Path, svg: bool = False) -> List[Path]:
    idt, env = cfg.require("idt", "environment")
    s = cfg.sweeps
    f = frequency_grid(s.freq_start, s.freq_stop, s.freq_step)
    g1 = emission_rate(f, idt, env)
    dl = lamb_shift(f, idt, env)
    amp = response_amplitude(f, idt)
    paths = [
        write_csv(GAMMA1_COLUMNS, zip(f, g1, dl), out / "idt_gamma1.csv"),
        write_csv(AMPLITUDE_COLUMNS, zip(f, amp), out / "idt_amplitude.csv"),
    ]
    if svg:
        paths.append(
            write_svg(
                [SpectrumTrace(f, g1, "gamma1"), SpectrumTrace(f, dl, "lamb shift")],
                out / "idt_gamma1.svg",
                xlabel="qubit frequency (Hz)",
                ylabel="rate (Hz)",
            )
        )
    return paths


def mirror_modes(cfg: Config) -> ModeTable:
    """Longitudinal modes of the configured cavity with IDT-derived couplings."""
    cav, idt = cfg.require("cavity", "idt")
    table = resonance_frequencies(cav.spec, loss=cav.loss)
    return populate_couplings(
        table,
        lambda f, pf: coupling_strength(f, idt, pf),
        cav.odd_coupling_factor,
        cav.transverse_coupling_factor,
    )


def mirror(cfg: Config, out: Path, svg: bool = False) -> List[Path]:
    (mp,) = cfg.require("mirror")
    band = stopband(mp)
    rows = [] if band is None else [(band.f_lo, band.f_hi, band.width, band.peak_freq, band.peak_reflectivity)]
    table = mirror_modes(cfg)
    paths = [
        write_csv(STOPBAND_COLUMNS, rows, out / "mirror_stopband.csv"),
        write_csv(ModeTable.CSV_COLUMNS, table.rows(), out / "mirror_modes.csv"),
    ]
    spacing = mode_spacings(table)
    paths.append(
        write_csv(
            ("lower_index", "spacing_hz"),
            [(m.longitudinal_index, d) for m, d in zip(table.longitudinal().modes, spacing)],
            out / "mirror_spacings.csv",
        )
    )
    if svg:
        f = frequency_grid(mp.bragg_freq - 300e6, mp.bragg_freq + 300e6, 0.5e6)
        r = np.abs(mirror_reflection(f, mp))
        paths.append(write_svg([SpectrumTrace(f, r, "|r|")], out / "mirror_reflectivity.svg",
                               xlabel="frequency (Hz)", ylabel="|r|"))
    return paths


def crossing_currents(cfg: Config, modes: ModeTable) -> np.ndarray:
    (tp,) = cfg.require("transmon")
    s = cfg.sweeps
    if s.current_start is not None and s.current_stop is not None:
        lo, hi = s.current_start, s.current_stop
    else:
        lo = current_for_freq(float(modes.freqs.max()) + 25e6, tp)
        hi = current_for_freq(float(modes.freqs.min()) - 15e6, tp)
    if s.n_currents < 2:
        raise ConfigError("sweeps.n_currents must be >= 2")
    return np.linspace(lo, hi, s.n_currents)


def crossing_model(cfg: Config) -> SystemModel:
    (tp,) = cfg.require("transmon")
    modes = cfg.modes if cfg.modes is not None else mirror_modes(cfg)
    return SystemModel(tp, modes)


def crossings(cfg: Config, out: Path, svg: bool = False) -> List[Path]:
    model = crossing_model(cfg)
    spec = crossing_spectrum(crossing_currents(cfg, model.modes), model)
    paths = [write_csv(spec.columns(), spec.rows(), out / "crossings.csv")]
    if svg:
        traces = [(spec.currents, spec.branches[:, k]) for k in range(spec.branches.shape[1])]
        paths.append(write_svg(traces, out / "crossings.svg", xlabel="coil current (A)", ylabel="frequency (Hz)"))
    return paths


def noisy_crossing_peaks(spec: CrossingSpectrum, noise: float, seed: int) -> list:
    """``(current, branches)`` pairs with additive Gaussian peak-position noise."""
    rng = derive_rng((seed, CROSSING_STREAM))
    noisy = spec.branches + noise * rng.standard_normal(spec.branches.shape)
    return [(float(i), np.sort(row)) for i, row in zip(spec.currents, noisy)]


def numbersplit_traces(cfg: Config, seed: int) -> list:
    """``(power, nbar, trace)`` for each configured drive power."""
    ns, drive = cfg.require("numbersplit", "drive")
    p = ns.params
    f = np.linspace(p.qubit_freq - ns.span_below, p.qubit_freq + ns.span_above, ns.n_points)
    out = []
    for k, power in enumerate(drive.powers):
        nbar = power_to_mean_phonon(DriveConfig(power, drive.conversion))
        clean = number_split_spectrum(f, p, nbar)
        values = clean.values
        if ns.noise > 0:
            values = values + ns.noise * derive_rng((seed, NUMBERSPLIT_STREAM, k)).standard_normal(f.size)
        out.append((power, nbar, SpectrumTrace(f, values, f"power={power:g}")))
    return out


def numbersplit(cfg: Config, out: Path, seed: int, svg: bool = False) -> List[Path]:
    traces = numbersplit_traces(cfg, seed)
    rows = [
        (k, power, nbar, fi, vi)
        for k, (power, nbar, t) in enumerate(traces)
        for fi, vi in zip(t.freqs, t.values)
    ]
    paths = [write_csv(NUMBERSPLIT_COLUMNS, rows, out / "numbersplit.csv")]
    if svg:
        peak = max((float(np.ptp(t.values)) for _, _, t in traces), default=1.0)
        paths.append(
            write_svg([t for _, _, t in traces], out / "numbersplit.svg", offset=0.6 * peak,
                      xlabel="qubit drive frequency (Hz)", ylabel="P_e (offset)")
        )
    return paths


def write_all(cfg: Config, out: Path, seed: int, svg: bool = False) -> List[Path]:
    """Every simulation artifact the reference configuration supports."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths: List[Path] = []
    paths += idt_response(cfg, out, svg)
    paths += mirror(cfg, out, svg)
    paths += crossings(cfg, out, svg)
    paths += numbersplit(cfg, out, seed, svg)
    return paths
