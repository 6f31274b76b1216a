"""Seeded synthetic datasets from the forward models."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence, Union

import numpy as np

from .models import get_model


@dataclass(frozen=True)
class SyntheticDataset:
    model_id: str
    x: np.ndarray
    y_true: np.ndarray
    y_noisy: np.ndarray
    noise_sigma: float
    seed: Any
    context: Any = None


def derive_rng(seed: Union[int, Sequence[int]]) -> np.random.Generator:
    """Independent generator per dataset; ``(seed, index)`` tuples never collide."""
    return np.random.default_rng(np.random.SeedSequence(seed))


def synth_dataset(model_id: str, params, x, noise_sigma: float, seed, context=None) -> SyntheticDataset:
    """Evaluate ``model_id`` at ``params`` and add seeded noise.

    Additive Gaussian noise of standard deviation ``noise_sigma`` for most
    models; for multiplicative models (T1 curves) ``noise_sigma`` is the
    standard deviation of the log-normal factor.
    """
    model = get_model(model_id)
    x = np.asarray(x, dtype=float)
    y_true = model.evaluate(x, np.asarray(params, dtype=float), context)
    if noise_sigma == 0:
        y_noisy = y_true.copy()
    else:
        noise = derive_rng(seed).standard_normal(y_true.shape)
        if model.noise == "multiplicative":
            y_noisy = y_true * np.exp(noise_sigma * noise)
        else:
            y_noisy = y_true + noise_sigma * noise
    return SyntheticDataset(model_id, x, y_true, y_noisy, float(noise_sigma), seed, context)


def crossing_abscissae(currents, n_modes: int) -> np.ndarray:
    """Repeat each current once per branch, matching the flattened branch layout."""
    return np.repeat(np.asarray(currents, dtype=float), n_modes + 1)
