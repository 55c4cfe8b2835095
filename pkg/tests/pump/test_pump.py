import math

import numpy as np
import pytest
from pydantic import ValidationError

from biphoton.analysis import marginal_fwhm
from biphoton.pump import (
    DifferentiatorError,
    DifferentiatorSpec,
    IdealDiff,
    PumpSpec,
    default_differentiator,
    estimate_diff_order,
    ideal_diff_transfer,
    mrr_diff_transfer,
    phase_order,
    pump_envelope,
    pump_spectrum,
    pump_waveform,
    ring_round_trip,
    tune_differentiator,
)
from biphoton.resonator import builtin_resonance, linewidth
from biphoton.units import GridError, make_grid, wavelength_to_omega

CENTER = wavelength_to_omega(1546.70)


def ring(tau_c: float = 0.9, alpha_rt: float = 0.98) -> DifferentiatorSpec:
    return DifferentiatorSpec(
        tau_c=tau_c, alpha_rt=alpha_rt, t_s=ring_round_trip(), omega_align=CENTER
    )


def test_gaussian_envelope():
    spec = PumpSpec(center=CENTER, fwhm_wavelength=100.0)
    assert pump_envelope(spec, CENTER) == pytest.approx(1.0)
    half = 0.5 * spec.fwhm_omega
    for offset in (-half, half):
        assert abs(pump_envelope(spec, CENTER + offset)) ** 2 == pytest.approx(0.5)
    assert spec.fwhm_omega == pytest.approx(0.0787, abs=1e-4)


def test_pump_spectrum_on_grid():
    spec = PumpSpec(center=CENTER, fwhm_wavelength=100.0)
    grid = make_grid(CENTER, 0.2, 41)
    values = pump_spectrum(spec, grid)
    assert values.shape == (41,)
    np.testing.assert_allclose(values, values[::-1], rtol=1e-9)


def test_invalid_pump():
    with pytest.raises(ValidationError):
        PumpSpec(center=CENTER, fwhm_wavelength=0.0)


def test_ideal_differentiator():
    spec = IdealDiff(order=1.0, omega0=CENTER)
    assert ideal_diff_transfer(spec, CENTER + 0.01) == pytest.approx(0.01j)
    assert ideal_diff_transfer(spec, CENTER - 0.01) == pytest.approx(-0.01j)
    assert ideal_diff_transfer(spec, CENTER) == 0


def test_ideal_differentiator_order():
    spec = IdealDiff(order=1.7, omega0=CENTER)
    assert estimate_diff_order(spec, 0.05) == pytest.approx(1.7, abs=1e-9)
    assert phase_order(spec, 0.05) == 1.7


def test_differentiated_pump_vanishes_at_carrier():
    spec = PumpSpec(
        center=CENTER,
        fwhm_wavelength=100.0,
        transform=IdealDiff(order=1.0, omega0=CENTER),
    )
    assert pump_envelope(spec, CENTER) == 0


def test_ring_transfer_on_resonance():
    spec = ring(tau_c=0.9, alpha_rt=0.98)
    expected = (0.9 - 0.98) / (1 - 0.9 * 0.98)
    assert mrr_diff_transfer(spec, CENTER) == pytest.approx(expected)
    fsr = spec.free_spectral_range
    assert mrr_diff_transfer(spec, CENTER + fsr) == pytest.approx(expected)


def test_lossless_ring_is_all_pass():
    spec = ring(tau_c=0.9, alpha_rt=1.0)
    omega = CENTER + np.linspace(-1.0, 1.0, 501)
    np.testing.assert_allclose(np.abs(mrr_diff_transfer(spec, omega)), 1.0)


def test_lossy_ring_is_passive():
    omega = CENTER + np.linspace(-1.0, 1.0, 501)
    assert np.all(np.abs(mrr_diff_transfer(ring(), omega)) <= 1.0)


def test_ring_round_trip():
    assert ring_round_trip() == pytest.approx(2.6408, abs=1e-3)
    with pytest.raises(DifferentiatorError):
        ring_round_trip(radius_um=0.0)


def test_band_wider_than_quarter_fsr():
    spec = ring()
    with pytest.raises(DifferentiatorError):
        estimate_diff_order(spec, spec.free_spectral_range / 2)
    with pytest.raises(DifferentiatorError):
        phase_order(spec, 0.0)


def test_phase_order_grows_towards_critical_coupling():
    band = 0.0787
    orders = [phase_order(ring(tau_c=t), band) for t in (0.2, 0.8, 0.95, 0.975)]
    assert orders == sorted(orders)
    assert orders[0] < 1.0 < orders[-1] < 2.0


def test_tune_differentiator():
    band = builtin_resonance("R2").decay
    spec = tune_differentiator(0.993, ring_round_trip(), CENTER, 1.7, band)
    assert 0.985 < spec.tau_c < 0.991
    assert phase_order(spec, band) == pytest.approx(1.7, abs=1e-3)
    assert default_differentiator(CENTER, band) == spec


def test_tuned_ring_is_narrower_than_pair_resonance():
    pair = builtin_resonance("R2")
    spec = default_differentiator(CENTER, pair.decay)
    loop = spec.tau_c * spec.alpha_rt
    ring_fwhm = 2.0 * (1.0 - loop) / (math.sqrt(loop) * spec.t_s)
    assert 0.3 < ring_fwhm / linewidth(pair) < 0.5


def test_tune_differentiator_unreachable():
    with pytest.raises(DifferentiatorError):
        tune_differentiator(0.98, ring_round_trip(), CENTER, 2.5, 0.0787)


@pytest.mark.parametrize("tau_c", [0.2, 0.8, 0.95, 0.975, 0.98, 0.99])
def test_ring_magnitude_order_at_most_one(tau_c):
    assert estimate_diff_order(ring(tau_c=tau_c), 0.0787) <= 1.0 + 1e-9


def test_critically_coupled_ring_is_first_order():
    spec = ring(tau_c=0.98, alpha_rt=0.98)
    assert estimate_diff_order(spec, 1e-3) == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("order", [0.5, 1.0, 2.0])
def test_ideal_order_recovered(order):
    spec = IdealDiff(order=order, omega0=CENTER)
    assert estimate_diff_order(spec, 0.02) == pytest.approx(order, abs=1e-3)


def test_waveform_of_gaussian_pump():
    spec = PumpSpec(center=CENTER, fwhm_wavelength=100.0)
    time = np.linspace(-100.0, 100.0, 2048)
    waveform = pump_waveform(spec, time)
    assert np.max(np.abs(waveform.field)) == pytest.approx(1.0)
    intensity = np.abs(waveform.field) ** 2
    expected = 4.0 * math.log(2.0) / spec.fwhm_omega
    assert marginal_fwhm(time, intensity) == pytest.approx(expected, rel=0.02)
    assert waveform.energy() == pytest.approx(waveform.spectral_energy(), rel=1e-9)
    assert np.all(np.diff(waveform.omega) > 0)


def test_waveform_needs_uniform_time():
    spec = PumpSpec(center=CENTER, fwhm_wavelength=100.0)
    with pytest.raises(GridError):
        pump_waveform(spec, [0.0, 1.0, 3.0])
    with pytest.raises(GridError):
        pump_waveform(spec, [0.0])


def test_first_order_waveform_has_central_null():
    spec = PumpSpec(
        center=CENTER,
        fwhm_wavelength=100.0,
        transform=IdealDiff(order=1.0, omega0=CENTER),
    )
    time = np.linspace(-100.0, 100.0, 2049)
    waveform = pump_waveform(spec, time)
    center = time.size // 2
    assert time[center] == 0.0
    assert abs(waveform.field[center]) < 1e-9
    assert np.max(np.abs(waveform.field)) == pytest.approx(1.0)
