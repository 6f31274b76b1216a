import warnings

import numpy as np
import pytest

from cqad.bragg_cavity import Mode, ModeTable
from cqad.errors import ContractError, DispersiveRegimeError, PoleError
from cqad.multimode_jc import (
    SystemModel,
    build_single_excitation_matrix,
    crossing_gaps,
    crossing_spectrum,
    dispersive_shift_numeric,
    dispersive_shift_perturbative,
    eigenfrequencies,
    solve_detuning,
    total_stark_hamiltonian_shifts,
)
from cqad.transmon import TransmonParams, current_for_freq

ALPHA = -190e6


def closed_form_detuning(two_chi, ratio, alpha):
    # 2 chi = 2 g^2 alpha / (Delta (Delta + alpha)) with g = Delta / ratio, solved for Delta
    t = two_chi * ratio**2
    return t * alpha / (2 * alpha - t)


def test_matrix_shape_and_trace(ref):
    h = build_single_excitation_matrix(4.25e9, ref.modes)
    assert h.shape == (15, 15)
    ev = eigenfrequencies(h)
    assert np.sum(ev) == pytest.approx(np.trace(h), rel=1e-14)
    assert np.all(np.diff(ev) >= 0)


def test_resonant_pair_splits_by_2g():
    modes = ModeTable((Mode(4.25e9, 1, "even", coupling=3e6),))
    ev = eigenfrequencies(build_single_excitation_matrix(4.25e9, modes))
    assert ev == pytest.approx([4.25e9 - 3e6, 4.25e9 + 3e6], abs=1e-3)


def test_rejects_bad_matrices():
    with pytest.raises(ContractError):
        eigenfrequencies(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ContractError):
        eigenfrequencies(np.zeros((2, 3)))
    with pytest.raises(ContractError):
        build_single_excitation_matrix(4e9, ModeTable())


def test_single_crossing_gap(transmon):
    modes = ModeTable((Mode(4.25e9, 1, "even", coupling=2e6),))
    i_res = current_for_freq(4.25e9, transmon)
    spec = crossing_spectrum(np.linspace(i_res - 2e-6, i_res + 2e-6, 4001), SystemModel(transmon, modes))
    assert crossing_gaps(spec)[0] == pytest.approx(4e6, rel=1e-3)


def test_reference_crossings(ref):
    model = SystemModel(ref.transmon, ref.modes)
    i = np.linspace(441.49e-6, 456.58e-6, 600)
    spec = crossing_spectrum(i, model)
    assert spec.branches.shape == (600, 15)
    assert np.all(np.diff(spec.branches, axis=1) >= 0)
    # branches move continuously with the sweep
    step = np.max(np.abs(np.diff(spec.branches, axis=0)))
    assert step < 2e6
    # every branch is pinned near a bare mode at one end of the sweep
    assert spec.columns()[0] == "current_a" and len(spec.columns()) == 16


def test_chi_sign_rule():
    # positive inside the straddling window 0 < Delta < -alpha, negative outside
    assert dispersive_shift_perturbative(2e6, 50e6, ALPHA) > 0
    assert dispersive_shift_perturbative(2e6, 300e6, ALPHA) < 0
    assert dispersive_shift_perturbative(2e6, -50e6, ALPHA) < 0
    assert dispersive_shift_perturbative(0.0, 50e6, ALPHA) == 0.0


def test_chi_poles():
    with pytest.raises(PoleError):
        dispersive_shift_perturbative(1e6, 0.0, ALPHA)
    with pytest.raises(PoleError):
        dispersive_shift_perturbative(1e6, 190e6, ALPHA)


def test_two_level_limit():
    # huge anharmonicity reduces the transmon to a qubit with chi = g^2 / Delta
    g, d = 1e6, 50e6
    chi = dispersive_shift_numeric(g, d, -1e12)
    assert chi == pytest.approx(g**2 / d, rel=0.01)


def test_numeric_agrees_deep_dispersive():
    g, d = 2e6, 60e6  # ratio 30
    num = dispersive_shift_numeric(g, d, ALPHA)
    assert dispersive_shift_perturbative(g, d, ALPHA) == pytest.approx(num, rel=0.02)


def test_perturbative_error_shrinks_with_ratio():
    d = 50e6
    errs = []
    for ratio in (6, 10, 20, 40):
        g = d / ratio
        num = dispersive_shift_numeric(g, d, ALPHA)
        errs.append(abs(dispersive_shift_perturbative(g, d, ALPHA) / num - 1))
    assert errs == sorted(errs, reverse=True)


def test_cutoff_guard():
    with pytest.raises(ContractError):
        dispersive_shift_numeric(1e6, 50e6, ALPHA, fock_cutoff=5)
    # the coupling conserves excitation number, so the labelled states never reach the cutoff
    a = dispersive_shift_numeric(5e6, 40e6, ALPHA, fock_cutoff=10)
    assert dispersive_shift_numeric(5e6, 40e6, ALPHA, fock_cutoff=20) == pytest.approx(a, rel=1e-9)


@pytest.mark.parametrize("two_chi,ratio", [(1.05e6, 11.0), (0.89e6, 11.0), (0.5e6, 18.0)])
def test_solve_detuning_matches_closed_form(two_chi, ratio):
    delta, g = solve_detuning(two_chi, ratio, ALPHA)
    assert delta == pytest.approx(closed_form_detuning(two_chi, ratio, ALPHA), abs=1.0)
    assert g == pytest.approx(delta / ratio)
    assert abs(2 * dispersive_shift_perturbative(g, delta, ALPHA)) == pytest.approx(two_chi, rel=1e-6)


def test_solve_detuning_reference():
    delta, _ = solve_detuning(1.05e6, 11.0, ALPHA)
    assert delta == pytest.approx(47.608e6, abs=1e3)


def test_solve_detuning_unreachable():
    with pytest.raises(ContractError):
        solve_detuning(-1e6, 11.0, ALPHA)


def test_stark_shift_regime_checks():
    tp = TransmonParams(5.718e9, 0.14, 1.168e-3, anharmonicity=ALPHA)
    modes = ModeTable((Mode(4.25e9, 1, "even", coupling=2e6),))
    model = SystemModel(tp, modes)
    with pytest.raises(DispersiveRegimeError):
        total_stark_hamiltonian_shifts(model, 4.25e9 + 4e6)
    with pytest.warns(RuntimeWarning):
        total_stark_hamiltonian_shifts(model, 4.25e9 + 10e6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        (s,) = total_stark_hamiltonian_shifts(model, 4.25e9 + 40e6)
    assert s.detuning == pytest.approx(40e6)
    assert s.single_phonon_shift == pytest.approx(2 * dispersive_shift_perturbative(2e6, 40e6, ALPHA))


def test_system_model_rejects_duplicate_modes(transmon):
    with pytest.raises(ContractError):
        SystemModel(transmon, ModeTable((Mode(4.2e9, 1, "odd"), Mode(4.2e9, 1, "even", transverse=True))))
