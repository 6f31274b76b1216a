import math

import numpy as np
import pytest

from cqad.errors import DomainError
from cqad.phonon_idt import (
    IdtParams,
    LambVariant,
    QubitEnvironment,
    coupling_slope_at_zero,
    coupling_strength,
    emission_rate,
    giant_atom_parameter,
    lamb_shift,
    lamb_shift_envelope,
    phonon_emission_rate,
    response_amplitude,
    sinc,
)


def test_sinc_series_branch_matches_direct_form():
    x = np.array([0.0, 1e-9, -5e-9, 1e-3, 2.0])
    ref = np.array([1.0, 1.0, 1.0, math.sin(1e-3) / 1e-3, math.sin(2.0) / 2.0])
    assert np.allclose(sinc(x), ref, rtol=1e-15, atol=0)


def test_response_zero_at_fringe_nulls(idt):
    k = np.arange(35, 44)
    assert np.all(np.abs(response_amplitude(k / idt.delay, idt)) < 1e-12)


def test_response_unity_at_center_with_half_integer_fc_tau():
    p = IdtParams(8, 38.5 / 9.04e-9, 9.04e-9, 11e6, 5.1e6)
    assert abs(abs(response_amplitude(p.center_freq, p)) - 1.0) < 1e-12


def test_response_zero_spacing_is_inverse_delay(idt):
    # stop short of the envelope zero at f_c (1 + 1/N_q) = 4.77 GHz
    f = np.arange(3.8e9, 4.7e9, 0.05e6)
    a = response_amplitude(f, idt)
    idx = np.nonzero(np.sign(a[:-1]) != np.sign(a[1:]))[0]
    spacing = np.diff(f[idx])
    assert np.all(np.abs(spacing - 1 / idt.delay) < 0.1e6)
    assert abs(1 / idt.delay - 110.6e6) < 0.1e6


def test_response_rejects_nonpositive_frequency(idt):
    with pytest.raises(DomainError):
        response_amplitude(0.0, idt)
    with pytest.raises(DomainError):
        emission_rate(-1.0, idt, QubitEnvironment(1e4))


def test_scalar_in_scalar_out(idt, env):
    assert isinstance(response_amplitude(4.2e9, idt), float)
    assert isinstance(emission_rate(4.2e9, idt, env), float)
    assert emission_rate(np.array([4.2e9, 4.3e9]), idt, env).shape == (2,)


def test_idt_length_consistency_checks():
    v = 2880.0
    IdtParams(8, 4.24e9, 9.04e-9, 11e6, 5.1e6, v, pitch=v / 4.24e9, half_length=8 * v / 4.24e9, separation=9.04e-9 * v)
    with pytest.raises(DomainError):
        IdtParams(8, 4.24e9, 9.04e-9, 11e6, 5.1e6, v, pitch=700e-9)
    with pytest.raises(DomainError):
        IdtParams(8, 4.24e9, 9.04e-9, 11e6, 5.1e6, v, separation=30e-6)
    with pytest.raises(DomainError):
        IdtParams(0, 4.24e9, 9.04e-9, 11e6, 5.1e6)


def test_coupling_zero_where_response_vanishes(idt):
    f = 38 / idt.delay
    for pf in (0.0, 0.3, 1.0):
        assert abs(coupling_strength(f, idt, pf)) < 1e-6


def test_coupling_near_center_approaches_max(idt):
    p = IdtParams(8, 38.5 / 9.04e-9, 9.04e-9, 11e6, 5.1e6)
    assert abs(abs(coupling_strength(p.center_freq, p, 1.0)) - 5.1e6) < 1.0


def test_transverse_factor_reduces_coupling_fivefold(idt):
    f = 4.25e9
    assert coupling_strength(f, idt, 0.2) == pytest.approx(coupling_strength(f, idt, 1.0) / 5, rel=1e-15)


def test_parity_factor_out_of_range(idt):
    with pytest.raises(DomainError):
        coupling_strength(4.25e9, idt, 1.5)


def test_slope_criterion(idt):
    assert coupling_slope_at_zero(idt) == pytest.approx(0.1448, abs=5e-5)
    assert coupling_slope_at_zero(IdtParams(8, 4.24e9, 2 * 9.04e-9, 11e6, 5.1e6)) == pytest.approx(
        2 * coupling_slope_at_zero(idt), rel=1e-15
    )


def test_slope_matches_numerical_derivative_at_null(idt):
    # full-envelope derivative differs from pi g0 tau only by the local sinc value
    f_z = 38 / idt.delay
    h = 1e3
    num = (coupling_strength(f_z + h, idt) - coupling_strength(f_z - h, idt)) / (2 * h)
    env = sinc(np.pi * (f_z - idt.center_freq) * idt.envelope_length / idt.sound_speed)
    assert abs(num) == pytest.approx(coupling_slope_at_zero(idt) * env, rel=1e-6)


def test_loss_floor_at_null(idt, env):
    f_null = 39 / idt.delay
    assert emission_rate(f_null, idt, env) == pytest.approx(f_null / 1.2e4, abs=1e-6)
    assert abs(emission_rate(f_null, idt, env) - 360e3) < 1e3


def test_emission_peak_value():
    p = IdtParams(8, 38.5 / 9.04e-9, 9.04e-9, 11e6, 5.1e6)
    env = QubitEnvironment(1.2e4)
    expected = p.center_freq / 1.2e4 + 11e6
    assert emission_rate(p.center_freq, p, env) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(11.35e6, rel=2e-3)


def test_phonon_part_identity(idt, env):
    f = np.linspace(3.8e9, 4.8e9, 1001)
    assert np.allclose(emission_rate(f, idt, env) - f / env.q_internal, phonon_emission_rate(f, idt), rtol=0, atol=1e-6)


def test_contrast_in_55_mhz_window(idt, env):
    f = np.arange(4.15e9, 4.35e9, 0.1e6)
    g = emission_rate(f, idt, env)
    n = 551
    best = max(g[i:i + n].max() / g[i:i + n].min() for i in range(0, g.size - n, 10))
    assert best >= 25


def test_lamb_envelope_peak(idt):
    assert lamb_shift_envelope(idt.center_freq, idt) == pytest.approx(2.75e6, abs=1e-6)


def test_lamb_variants_periods(idt):
    f = np.arange(3.9e9, 4.6e9, 0.05e6)
    for variant, period in ((LambVariant.KRAMERS_KRONIG, 1 / idt.delay), (LambVariant.AS_WRITTEN, 2 / idt.delay)):
        d = lamb_shift(f, idt, QubitEnvironment(1.2e4, variant))
        idx = np.nonzero(np.sign(d[:-1]) != np.sign(d[1:]))[0]
        assert np.allclose(2 * np.diff(f[idx]), period, atol=0.2e6)


def test_lamb_zero_where_sine_vanishes(idt):
    f = 38 / idt.delay
    for variant in LambVariant:
        assert abs(lamb_shift(f, idt, QubitEnvironment(1e4, variant))) < 1e-6


def test_lamb_variant_from_string():
    assert QubitEnvironment(1e4, "AsWritten").lamb_variant is LambVariant.AS_WRITTEN


def test_giant_atom_parameter(idt):
    assert giant_atom_parameter(idt) == pytest.approx(0.3124, abs=1e-4)
    p = IdtParams(8, 4.24e9, 1 / (math.pi * 11e6), 11e6, 5.1e6)
    assert giant_atom_parameter(p) == pytest.approx(1.0, rel=1e-15)
