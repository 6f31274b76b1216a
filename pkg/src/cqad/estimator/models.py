"""Forward models addressable by id, in the flat-vector form the fitter needs.

Every model maps ``(x, params, context) -> y`` with ``y`` the same length as
``x``.  Multi-output models flatten: crossing spectra repeat each current once
per branch, number-splitting traces concatenate with a per-point trace index in
the context.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..bragg_cavity import ModeTable
from ..errors import ContractError
from ..multimode_jc import _arrowhead, _eigvalsh_shifted
from ..phonon_idt import IdtParams, QubitEnvironment, emission_rate
from ..spectra import NumberSplitParams, number_split_values
from ..transmon import TransmonParams, freq_vs_current

FLUX = "FluxCurve"
T1 = "T1Curve"
CROSSINGS = "Crossings"
NUMBER_SPLIT = "NumberSplit"
LINEAR = "Linear"


@dataclass(frozen=True)
class Model:
    model_id: str
    evaluate: Callable
    param_names: Callable
    noise: str = "additive"  # or "multiplicative"


# -- flux curve: (f0, a, Ic, I0) ------------------------------------------------

def _flux(x, p, context=None):
    f0, a, ic, i0 = p
    phase = np.pi * (x - i0) / ic
    a2 = a * a
    return f0 * (a2 + (1 - a2) * np.cos(phase) ** 2) ** 0.25


def flux_vector(tp: TransmonParams) -> np.ndarray:
    return np.array([tp.zero_field_freq, tp.asymmetry, tp.half_quantum_current, tp.offset_current])


# -- T1 curve: (Q_i, Gamma_0, f_c, tau); context = n_periods ---------------------

@dataclass(frozen=True)
class T1Context:
    n_periods: int = 8


def _t1(x, p, context=None):
    n_periods = context.n_periods if context is not None else 8
    q_i, gamma0, f_c, tau = p
    idt = _loose_idt(n_periods, f_c, tau, gamma0)
    return emission_rate(x, idt, QubitEnvironment(q_i))


def _loose_idt(n_periods, f_c, tau, gamma0):
    # fitter may probe the bound of Gamma_0; IdtParams requires > 0
    return IdtParams(n_periods, f_c, tau, max(gamma0, 1e-300), 1.0)


def t1_vector(idt: IdtParams, env: QubitEnvironment) -> np.ndarray:
    return np.array([env.q_internal, idt.max_emission, idt.center_freq, idt.delay])


# -- crossings: (f_1..f_M, g_1..g_M); context = CrossingContext -------------------

@dataclass(frozen=True)
class CrossingContext:
    transmon: TransmonParams
    n_modes: int


def _crossings(x, p, context: CrossingContext):
    m = context.n_modes
    nb = m + 1
    if x.size % nb:
        raise ContractError("crossing abscissae must repeat each current once per branch")
    currents = x[::nb]
    f_q = freq_vs_current(currents, context.transmon)
    h = _arrowhead(np.atleast_1d(f_q), p[:m], np.abs(p[m:]))
    return _eigvalsh_shifted(h).ravel()


def crossing_vector(modes: ModeTable) -> np.ndarray:
    return np.concatenate([modes.freqs, np.abs(modes.couplings)])


# -- number splitting: shared (f_q, gamma, kappa, chi) + per trace (nbar, C0, C1) --

@dataclass(frozen=True)
class NumberSplitContext:
    trace_index: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    n_traces: int = 1
    n_max: int = 6
    pull_per_phonon: float = 0.0


def _number_split(x, p, context: NumberSplitContext):
    f_q, gamma, kappa, chi = p[:4]
    out = np.empty_like(x)
    for k in range(context.n_traces):
        nbar, c0, c1 = p[4 + 3 * k: 7 + 3 * k]
        sel = context.trace_index == k
        nsp = NumberSplitParams(
            f_q, max(gamma, 1e-300), max(kappa, 0.0), chi, context.n_max, c0, max(c1, 1e-300), context.pull_per_phonon
        )
        out[sel] = number_split_values(x[sel], nsp, max(nbar, 0.0))
    return out


def _number_split_names(context: NumberSplitContext):
    names = ["qubit_freq", "qubit_linewidth", "mode_loss", "half_shift"]
    for k in range(context.n_traces):
        names += [f"nbar_{k}", f"offset_{k}", f"amplitude_{k}"]
    return names


# -- linear: (slope, intercept) -------------------------------------------------

def _linear(x, p, context=None):
    return p[0] * x + p[1]


MODELS = {
    FLUX: Model(FLUX, _flux, lambda c=None: ["zero_field_freq", "asymmetry", "half_quantum_current", "offset_current"]),
    T1: Model(T1, _t1, lambda c=None: ["q_internal", "max_emission", "center_freq", "delay"], noise="multiplicative"),
    CROSSINGS: Model(
        CROSSINGS,
        _crossings,
        lambda c: [f"freq_{i}" for i in range(c.n_modes)] + [f"coupling_{i}" for i in range(c.n_modes)],
    ),
    NUMBER_SPLIT: Model(NUMBER_SPLIT, _number_split, _number_split_names),
    LINEAR: Model(LINEAR, _linear, lambda c=None: ["slope", "intercept"]),
}


def get_model(model_id: str) -> Model:
    try:
        return MODELS[model_id]
    except KeyError:
        raise ContractError(f"unknown model_id {model_id!r}; expected one of {sorted(MODELS)}") from None
