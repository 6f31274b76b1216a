"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 acceptance failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__, acceptance, pipeline
from .config import Config, load_config, reference_config
from .errors import ConfigError, CqadError
from .estimator import (
    fit_crossings,
    fit_flux_curve,
    fit_linear,
    fit_number_splitting,
    fit_t1_curve,
    synth_dataset,
)
from .estimator.models import CROSSINGS, FLUX, LINEAR, NUMBER_SPLIT, T1, T1Context, flux_vector, t1_vector
from .estimator.synth import SyntheticDataset
from .multimode_jc import crossing_spectrum
from .output import read_csv, write_csv
from .spectra import SpectrumTrace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ACCEPTANCE = 4

FIT_MODELS = (FLUX, T1, CROSSINGS, NUMBER_SPLIT, LINEAR)
SYNTH_MODELS = (FLUX, T1, CROSSINGS, NUMBER_SPLIT)
FLUX_SWEEP = (-0.5e-3, 0.8e-3, 500)


@dataclass
class RunConfig:
    command: str
    params_file: Optional[Path]
    output_dir: Path
    seed: int = 0
    emit_svg: bool = False


@dataclass
class RunReport:
    command: str
    wall_time: float = 0.0
    artifacts: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"command": self.command, "wall_time_s": round(self.wall_time, 3),
             "artifacts": self.artifacts, "warnings": self.warnings},
            indent=2,
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="JSON parameter file (default: the shipped reference set)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=0, help="root seed for synthetic noise")
    common.add_argument("--svg", action="store_true", help="also write SVG plots")

    parser = argparse.ArgumentParser(prog="cqad", description="Acoustic-cavity circuit QED simulation and fitting.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    sub.add_parser("idt-response", parents=[common], help="transducer response, loss rate and Lamb shift vs frequency")
    sub.add_parser("mirror", parents=[common], help="Bragg stopband and cavity mode table")
    sub.add_parser("crossings", parents=[common], help="flux-swept avoided-crossing spectrum")
    sub.add_parser("numbersplit", parents=[common], help="number-split spectra over the drive powers")
    p = sub.add_parser("synth", parents=[common], help="write a noisy synthetic dataset for one fit model")
    p.add_argument("model", choices=SYNTH_MODELS)
    p.add_argument("--noise", type=float, default=None,
                   help="noise level (Hz for additive models, log-normal sigma for T1Curve)")
    p = sub.add_parser("fit", parents=[common], help="fit a model to a dataset CSV and write the result JSON")
    p.add_argument("model", choices=FIT_MODELS)
    p.add_argument("--data", type=Path, required=True, help="dataset CSV")
    sub.add_parser("papercheck", parents=[common], help="run the acceptance suite and write its artifacts")
    return parser


def _load(rc: RunConfig) -> Config:
    if rc.params_file is None:
        return reference_config()
    return load_config(rc.params_file)


def _prepare_out(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from exc
    return path


# -- synth ---------------------------------------------------------------------

def _synth(cfg: Config, model: str, out: Path, seed: int, noise: Optional[float]) -> List[Path]:
    if model == FLUX:
        (tp,) = cfg.require("transmon")
        x = np.linspace(*FLUX_SWEEP)
        d = synth_dataset(FLUX, flux_vector(tp), x, 100e3 if noise is None else noise, (seed, 8))
        return [write_csv(("current_a", "freq_hz"), zip(d.x, d.y_noisy), out / "synth_flux.csv")]
    if model == T1:
        idt, env = cfg.require("idt", "environment")
        s = cfg.sweeps
        x = pipeline.frequency_grid(s.freq_start, s.freq_stop, max(s.freq_step, 1e6))
        d = synth_dataset(T1, t1_vector(idt, env), x, 0.05 if noise is None else noise, (seed, 1),
                          T1Context(idt.n_periods))
        return [write_csv(("freq_hz", "gamma1_hz"), zip(d.x, d.y_noisy), out / "synth_t1.csv")]
    if model == CROSSINGS:
        m = pipeline.crossing_model(cfg)
        spec = crossing_spectrum(pipeline.crossing_currents(cfg, m.modes), m)
        level = cfg.sweeps.crossing_noise if noise is None else noise
        peaks = pipeline.noisy_crossing_peaks(spec, level, seed)
        rows = [(i, *b) for i, b in peaks]
        return [write_csv(spec.columns(), rows, out / "synth_crossings.csv")]
    # number splitting noise lives in the config section
    return pipeline.numbersplit(cfg, out, seed)


# -- fit -----------------------------------------------------------------------

def _fit(cfg: Config, model: str, data: Path, out: Path) -> List[Path]:
    if not data.is_file():
        raise ConfigError(f"dataset not found: {data}")
    try:
        columns, arr = read_csv(data)
    except ValueError as exc:
        raise ConfigError(f"{data}: non-numeric CSV content ({exc})") from exc
    col = {c: i for i, c in enumerate(columns)}

    def need(*names):
        missing = [n for n in names if n not in col]
        if missing:
            raise ConfigError(f"{data}: missing columns {missing} for model {model}")
        return [arr[:, col[n]] for n in names]

    extra = {}
    if model == FLUX:
        x, y = need("current_a", "freq_hz")
        res = fit_flux_curve(SyntheticDataset(FLUX, x, y, y, 0.0, None))
    elif model == T1:
        x, y = need("freq_hz", "gamma1_hz")
        n_periods = cfg.idt.n_periods if cfg.idt is not None else 8
        t1 = fit_t1_curve(SyntheticDataset(T1, x, y, y, 0.0, None), n_periods=n_periods)
        res = t1.result
        extra = {"tau_seed": t1.tau_seed, "qi_relative_uncertainty": t1.qi_relative_uncertainty,
                 "qi_poorly_constrained": t1.qi_poorly_constrained}
    elif model == CROSSINGS:
        (current,) = need("current_a")
        branch_cols = sorted((c for c in columns if c.startswith("branch_")), key=lambda c: int(c.split("_")[1]))
        branches = arr[:, [col[c] for c in branch_cols]]
        skeleton = pipeline.crossing_model(cfg)
        sigma = cfg.sweeps.crossing_noise or 1e3
        fit = fit_crossings(list(zip(current, branches)), skeleton, sigma=sigma)
        res = fit.result
        extra = {"modes": [dict(zip(("index", "freq_hz", "parity", "transverse", "kappa_hz", "g_hz"), r))
                           for r in fit.modes.rows()]}
    elif model == NUMBER_SPLIT:
        tid, power, f, v = need("trace_id", "power", "freq_hz", "p_e")
        traces, powers = [], []
        for k in np.unique(tid):
            sel = tid == k
            traces.append(SpectrumTrace(f[sel], v[sel]))
            powers.append(float(power[sel][0]))
        n_max = cfg.numbersplit.params.n_max if cfg.numbersplit is not None else 6
        pull = cfg.numbersplit.params.pull_per_phonon if cfg.numbersplit is not None else 0.0
        sigma = (cfg.numbersplit.noise or None) if cfg.numbersplit is not None else None
        fit = fit_number_splitting(traces, n_max=n_max, pull_per_phonon=pull, sigma=sigma)
        res = fit.result
        extra = {"powers": powers, "nbar": fit.nbar.tolist(), "chi_identifiable": fit.chi_identifiable}
        if len(powers) >= 2:
            line = fit_linear(powers, fit.nbar)
            extra["nbar_vs_power"] = {"slope": line.slope, "intercept": line.intercept, "r_squared": line.r_squared}
    else:
        x, y = need("x", "y")
        line = fit_linear(x, y)
        res = line.result
        extra = {"r_squared": line.r_squared}
    doc = res.to_json()
    doc["model_id"] = model
    doc.update(extra)
    path = out / f"fit_{model}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return [path]


# -- papercheck ----------------------------------------------------------------

def _papercheck(cfg: Config, out: Path, seed: int, svg: bool) -> tuple:
    results = acceptance.run_all(cfg, seed)
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    paths = pipeline.write_all(cfg, out, seed, svg)
    paths.append(
        write_csv(("criterion", "name", "passed", "detail"),
                  [(r.number, r.name, r.passed, r.detail) for r in results], out / "acceptance.csv")
    )
    return paths, passed == len(results)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    rc = RunConfig(args.command, args.config, args.out, args.seed, args.svg)
    report = RunReport(rc.command)
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = _load(rc)
            out = _prepare_out(rc.output_dir)
            if rc.command == "idt-response":
                paths = pipeline.idt_response(cfg, out, rc.emit_svg)
            elif rc.command == "mirror":
                paths = pipeline.mirror(cfg, out, rc.emit_svg)
            elif rc.command == "crossings":
                paths = pipeline.crossings(cfg, out, rc.emit_svg)
            elif rc.command == "numbersplit":
                paths = pipeline.numbersplit(cfg, out, rc.seed, rc.emit_svg)
            elif rc.command == "synth":
                paths = _synth(cfg, args.model, out, rc.seed, args.noise)
            elif rc.command == "fit":
                paths = _fit(cfg, args.model, args.data, out)
            else:
                paths, ok = _papercheck(cfg, out, rc.seed, rc.emit_svg)
                if not ok:
                    code = EXIT_ACCEPTANCE
        report.warnings = [str(w.message) for w in caught]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CqadError, ArithmeticError, np.linalg.LinAlgError, OSError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report.wall_time = time.perf_counter() - t0
    report.artifacts = [str(p) for p in paths]
    print(report.to_json(), file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
