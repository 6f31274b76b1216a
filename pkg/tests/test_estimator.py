import numpy as np
import pytest

from cqad.bragg_cavity import Mode, ModeTable
from cqad.errors import ContractError, RankDeficientError
from cqad.estimator import (
    FLUX,
    LINEAR,
    T1,
    FitProblem,
    SyntheticDataset,
    crossing_peaks,
    derive_rng,
    fit_crossings,
    fit_flux_curve,
    fit_linear,
    fit_number_splitting,
    fit_t1_curve,
    least_squares_fit,
    scan_delay,
    synth_dataset,
)
from cqad.estimator.fits import flux_initial_guess
from cqad.estimator.models import T1Context, flux_vector, get_model, t1_vector
from cqad.phonon_idt import emission_rate
from cqad.multimode_jc import SystemModel, crossing_spectrum
from cqad.spectra import NumberSplitParams, number_split_spectrum
from cqad.transmon import current_for_freq

FLUX_X = np.linspace(-0.5e-3, 0.8e-3, 500)
T1_X = np.arange(3.8e9, 4.8e9 + 1, 1e6)


def _flux_data(transmon, noise, seed=0):
    return synth_dataset(FLUX, flux_vector(transmon), FLUX_X, noise, (seed, 8))


def test_linear_exact_two_points():
    line = fit_linear([1.0, 3.0], [2.0, 8.0])
    assert line.slope == pytest.approx(3.0, rel=1e-9)
    assert line.intercept == pytest.approx(-1.0, abs=1e-8)
    assert line.r_squared == pytest.approx(1.0)
    with pytest.raises(ContractError):
        fit_linear([1.0], [1.0])


def test_linear_matches_polyfit():
    rng = np.random.default_rng(3)
    x = np.linspace(0, 4, 30)
    y = 0.5 * x + 0.1 + 0.01 * rng.standard_normal(30)
    line = fit_linear(x, y)
    ref = np.polyfit(x, y, 1)
    assert line.slope == pytest.approx(ref[0], rel=1e-7)
    assert line.intercept == pytest.approx(ref[1], rel=1e-6)


def test_flux_noiseless_round_trip(transmon):
    res = fit_flux_curve(_flux_data(transmon, 0.0))
    assert res.converged
    assert np.max(np.abs(res.params / flux_vector(transmon) - 1)) < 1e-6


def test_flux_noisy(transmon):
    res = fit_flux_curve(_flux_data(transmon, 100e3))
    assert np.max(np.abs(res.params / flux_vector(transmon) - 1)) < 0.005
    # reported uncertainties are honest to within a factor of a few
    z = np.abs(res.params - flux_vector(transmon)) / res.stderr
    assert np.all(z < 5)


def test_flux_error_grows_with_noise(transmon):
    truth = flux_vector(transmon)
    med = []
    for noise in (30e3, 300e3, 3e6):
        errs = [np.max(np.abs(fit_flux_curve(_flux_data(transmon, noise, s)).params / truth - 1)) for s in range(20)]
        med.append(np.median(errs))
    assert med[0] < med[1] < med[2]


def test_mask_excludes_points(transmon):
    d = _flux_data(transmon, 100e3)
    mask = np.zeros(d.x.size, bool)
    mask[::7] = True
    p0 = flux_initial_guess(d.x, d.y_noisy)
    a = fit_flux_curve(d, init=p0, mask=mask)
    y = d.y_noisy.copy()
    y[mask] = 1e15  # wild values at masked points must not matter
    b = fit_flux_curve(SyntheticDataset(FLUX, d.x, d.y_true, y, d.noise_sigma, d.seed), init=p0, mask=mask)
    assert np.array_equal(a.params, b.params)


def test_fit_is_deterministic(transmon):
    d = _flux_data(transmon, 100e3)
    assert np.array_equal(fit_flux_curve(d).params, fit_flux_curve(d).params)
    assert np.array_equal(derive_rng((0, 3)).standard_normal(5), derive_rng((0, 3)).standard_normal(5))
    assert not np.array_equal(derive_rng((0, 3)).standard_normal(5), derive_rng((0, 4)).standard_normal(5))


def test_iteration_cap_reports_not_converged(transmon):
    d = _flux_data(transmon, 100e3)
    p0 = flux_initial_guess(d.x, d.y_noisy)
    f0, a, ic, i0 = p0
    bounds = [(0.5 * f0, 2 * f0), (0.0, 1.0), (0.5 * ic, 2 * ic), (i0 - 0.5 * ic, i0 + 0.5 * ic)]
    res = least_squares_fit(FitProblem(FLUX, d.x, d.y_noisy, 100e3, p0, bounds), max_iter=1)
    assert not res.converged and res.iterations == 1


def test_rank_deficient_problem():
    # a single repeated abscissa cannot separate slope from intercept
    x = np.full(5, 2.0)
    prob = FitProblem(LINEAR, x, 3 * x + 1, 1.0, [0.0, 0.0], [(-10, 10), (-10, 10)])
    with pytest.raises(RankDeficientError):
        least_squares_fit(prob)
    res = least_squares_fit(prob, allow_degenerate=True)
    assert res.degenerate == (0, 1)
    assert np.isinf(res.stderr[0])


def test_problem_validation():
    with pytest.raises(ContractError):
        FitProblem(LINEAR, [1, 2], [1, 2, 3], 1.0, [0, 0], [(-1, 1), (-1, 1)])
    with pytest.raises(ContractError):
        FitProblem(LINEAR, [1, 2], [1, 2], 0.0, [0, 0], [(-1, 1), (-1, 1)])
    with pytest.raises(ContractError):
        FitProblem(LINEAR, [1, 2], [1, 2], 1.0, [5, 0], [(-1, 1), (-1, 1)])
    with pytest.raises(ContractError):
        get_model("Parabola")


def test_t1_noiseless(idt, env):
    d = synth_dataset(T1, t1_vector(idt, env), T1_X, 0.0, (0, 1), T1Context(8))
    fit = fit_t1_curve(d)
    assert np.max(np.abs(fit.result.params / t1_vector(idt, env) - 1)) < 1e-6


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_t1_with_relative_noise(idt, env, seed):
    d = synth_dataset(T1, t1_vector(idt, env), T1_X, 0.05, (seed, 1), T1Context(8))
    fit = fit_t1_curve(d)
    assert fit.delay == pytest.approx(idt.delay, rel=0.005)
    assert fit.max_emission == pytest.approx(idt.max_emission, rel=0.03)
    assert fit.q_internal == pytest.approx(env.q_internal, rel=0.10)


def test_delay_scan_picks_true_alias(idt, env):
    d = synth_dataset(T1, t1_vector(idt, env), T1_X, 0.05, (0, 1), T1Context(8))
    assert scan_delay(d.x, d.y_noisy) == pytest.approx(idt.delay, rel=0.01)


def test_t1_flags_internal_q_without_nulls(idt, env):
    # keep only a window around the emission peak, away from the loss-dominated nulls
    d = synth_dataset(T1, t1_vector(idt, env), T1_X, 0.05, (0, 1), T1Context(8))
    mask = emission_rate(d.x, idt, env) < 20 * d.x / env.q_internal
    fit = fit_t1_curve(d, mask=mask)
    assert fit.qi_poorly_constrained


def _two_mode_model(transmon, g=(2e6, 1.2e6)):
    modes = ModeTable((Mode(4.25e9, 370, "even", coupling=g[0]), Mode(4.2607e9, 371, "odd", coupling=g[1])))
    return SystemModel(transmon, modes)


def _sweep(model):
    lo = current_for_freq(model.modes.freqs.max() + 15e6, model.transmon)
    hi = current_for_freq(model.modes.freqs.min() - 15e6, model.transmon)
    return np.linspace(lo, hi, 300)


def test_crossings_noiseless_round_trip(transmon):
    model = _two_mode_model(transmon)
    spec = crossing_spectrum(_sweep(model), model)
    start = SystemModel(transmon, model.modes.replace_values(freqs=model.modes.freqs + [0.5e6, -0.5e6],
                                                             couplings=model.modes.couplings * 1.1))
    fit = fit_crossings(crossing_peaks(spec), start)
    assert np.max(np.abs(fit.modes.freqs - model.modes.freqs)) < 1.0
    assert np.max(np.abs(fit.modes.couplings / model.modes.couplings - 1)) < 1e-6


def test_crossings_uncoupled_mode(transmon):
    model = _two_mode_model(transmon, g=(2e6, 0.0))
    spec = crossing_spectrum(_sweep(model), model)
    fit = fit_crossings(crossing_peaks(spec), SystemModel(transmon, model.modes.replace_values(
        couplings=np.array([2.2e6, 0.3e6]))))
    assert fit.modes.couplings[0] == pytest.approx(2e6, rel=1e-4)
    assert fit.modes.couplings[1] < 20e3


def test_crossings_branch_count_checked(transmon):
    model = _two_mode_model(transmon)
    with pytest.raises(ContractError):
        fit_crossings([(0.0, [4.2e9, 4.3e9])], model)


def test_number_split_noiseless_joint_fit():
    p = NumberSplitParams(4.35e9, 550e3, 275e3, 445e3, offset=0.02, amplitude=400e3)
    f = np.linspace(4.344e9, 4.352e9, 801)
    nbars = (0.3, 1.0, 2.0)
    traces = [number_split_spectrum(f, p, n) for n in nbars]
    fit = fit_number_splitting(traces)
    assert fit.chi_identifiable
    assert np.allclose(fit.nbar, nbars, rtol=1e-5)
    assert fit.shared.half_shift == pytest.approx(445e3, rel=1e-5)
    assert fit.shared.mode_loss == pytest.approx(275e3, rel=1e-4)


def test_number_split_vacuum_trace_cannot_fix_chi():
    p = NumberSplitParams(4.35e9, 550e3, 275e3, 445e3, offset=0.02, amplitude=400e3)
    f = np.linspace(4.344e9, 4.352e9, 801)
    fit = fit_number_splitting([number_split_spectrum(f, p, 0.0)])
    assert not fit.chi_identifiable
    with pytest.raises(ContractError):
        fit_number_splitting([])


def test_synth_noise_models(idt, env, transmon):
    d = synth_dataset(T1, t1_vector(idt, env), T1_X, 0.05, (0, 1), T1Context(8))
    ratio = np.log(d.y_noisy / d.y_true)
    assert np.std(ratio) == pytest.approx(0.05, rel=0.15)
    d = _flux_data(transmon, 100e3)
    assert np.std(d.y_noisy - d.y_true) == pytest.approx(100e3, rel=0.15)
