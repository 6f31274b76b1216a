"""Synthetic data and nonlinear least-squares recovery of model parameters."""
from .fits import (
    CrossingFit,
    LinearFit,
    NumberSplitFit,
    T1Fit,
    crossing_peaks,
    fit_crossings,
    fit_flux_curve,
    fit_linear,
    fit_number_splitting,
    fit_t1_curve,
    scan_delay,
)
from .lsq import FitProblem, FitResult, least_squares_fit
from .models import CROSSINGS, FLUX, LINEAR, NUMBER_SPLIT, T1, MODELS
from .synth import SyntheticDataset, crossing_abscissae, derive_rng, synth_dataset

__all__ = [
    "CROSSINGS", "FLUX", "LINEAR", "MODELS", "NUMBER_SPLIT", "T1",
    "CrossingFit", "FitProblem", "FitResult", "LinearFit", "NumberSplitFit", "SyntheticDataset", "T1Fit",
    "crossing_abscissae", "crossing_peaks", "derive_rng", "fit_crossings", "fit_flux_curve", "fit_linear",
    "fit_number_splitting", "fit_t1_curve", "least_squares_fit", "scan_delay", "synth_dataset",
]
