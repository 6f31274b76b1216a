import math

import numpy as np
import pytest
from scipy import integrate, stats

from cqad.errors import DomainError
from cqad.spectra import (
    DriveConfig,
    NumberSplitParams,
    SpectrumTrace,
    local_maxima,
    lorentzian,
    mean_line_position,
    number_split_spectrum,
    peak_centers,
    poisson_weights,
    power_to_mean_phonon,
    resolvability,
)

P = NumberSplitParams(4.35e9, 550e3, 275e3, 445e3, n_max=6)


def test_poisson_tail_deficit():
    w = poisson_weights(1.0, 6)
    assert 1 - w.sum() == pytest.approx(stats.poisson.sf(6, 1.0), rel=1e-9)
    assert np.allclose(w, stats.poisson.pmf(np.arange(7), 1.0), rtol=1e-12)


@pytest.mark.parametrize("nbar", [0.3, 1.7, 2.5, 4.2])
def test_poisson_mode(nbar):
    assert int(np.argmax(poisson_weights(nbar, 12))) == math.floor(nbar)


def test_poisson_integer_mean_ties():
    w = poisson_weights(3.0, 12)
    assert w[2] == pytest.approx(w[3], rel=1e-12)


def test_poisson_vacuum_and_domain():
    assert poisson_weights(0.0, 4).tolist() == [1, 0, 0, 0, 0]
    with pytest.raises(DomainError):
        poisson_weights(-0.1, 4)


def test_lorentzian_peak_and_area():
    w = 500e3
    assert lorentzian(0.0, 0.0, w) == pytest.approx(2 / (math.pi * w))
    area, _ = integrate.quad(lambda x: lorentzian(x, 0.0, w), -80 * w, 80 * w, limit=200)
    assert area >= 0.996


def test_peak_spacing_is_single_phonon_shift():
    c = peak_centers(P, 1.0)
    assert np.allclose(np.diff(c), -P.single_phonon_shift)
    assert c[0] == P.qubit_freq


def test_zero_drive_is_one_lorentzian():
    f = np.linspace(4.34e9, 4.36e9, 2001)
    t = number_split_spectrum(f, P, 0.0)
    assert np.allclose(t.values, lorentzian(f, P.qubit_freq, P.qubit_linewidth), rtol=1e-12)


def test_resolved_comb_has_several_maxima():
    f = np.linspace(4.344e9, 4.352e9, 4001)
    t = number_split_spectrum(f, NumberSplitParams(4.35e9, 250e3, 100e3, 525e3), 1.5)
    assert local_maxima(t).size >= 3


def test_reference_mode_shows_two_peaks():
    # 2 chi = 1.05 MHz against a 550 kHz qubit line
    f = np.linspace(4.344e9, 4.352e9, 4001)
    t = number_split_spectrum(f, NumberSplitParams(4.35e9, 550e3, 250e3, 525e3), 1.0)
    assert local_maxima(t).size >= 2


def test_first_moment_tracks_mean_phonon():
    for nbar in (0.5, 1.0, 2.0):
        m = mean_line_position(P, nbar)
        w = poisson_weights(nbar, P.n_max)
        expect = P.qubit_freq - P.single_phonon_shift * (w @ np.arange(P.n_max + 1)) / w.sum()
        assert m == pytest.approx(expect, rel=1e-15)
    assert mean_line_position(P, 0.0) == P.qubit_freq


def test_resolvability():
    assert resolvability(445e3, 550e3, 275e3).resolved
    r = resolvability(250e3, 550e3, 200e3)
    assert not r.resolved and r.qubit_margin < 0 < r.mode_margin
    with pytest.raises(DomainError):
        resolvability(-1.0, 1.0, 1.0)


def test_power_mapping_is_linear():
    powers = np.array([0.0, 0.6, 2.0, 4.0])
    nbar = np.array([power_to_mean_phonon(DriveConfig(p, 0.5)) for p in powers])
    slope, intercept = np.polyfit(powers, nbar, 1)
    assert abs(slope - 0.5) < 1e-12 and abs(intercept) < 1e-12


def test_validation():
    with pytest.raises(DomainError):
        NumberSplitParams(4e9, 0.0, 1e5, 1e5)
    with pytest.raises(DomainError):
        NumberSplitParams(4e9, 1e5, 1e5, 1e5, n_max=0)
    with pytest.raises(DomainError):
        SpectrumTrace([2.0, 1.0], [0.0, 0.0])
    with pytest.raises(DomainError):
        DriveConfig(-1.0)
