import numpy as np
import pytest

from biphoton.io import InputError
from biphoton.resonator import builtin_resonance, linewidth, unsplit
from biphoton.specfit import (
    FitError,
    FitOptions,
    SpectrumSample,
    fit_resonance,
    initial_guess,
    r_squared,
    read_spectrum_csv,
    synthesize_spectrum,
    write_spectrum_csv,
)
from biphoton.units import make_grid


def spectrum(name: str, points: int = 400, linewidths: float = 8.0, **kwargs):
    res = builtin_resonance(name)
    grid = make_grid(res.omega0, linewidths * linewidth(res), points)
    return res, synthesize_spectrum(res, grid, **kwargs)


def test_r_squared():
    data = np.array([1.0, 0.5, 0.2, 0.5, 1.0])
    assert r_squared(data, data) == 1.0
    assert r_squared(data, np.full(5, data.mean())) == pytest.approx(0.0)
    assert r_squared(np.ones(5), np.ones(5)) == 1.0
    assert r_squared(np.ones(5), np.zeros(5)) == 0.0


def test_synthesized_spectrum_is_ascending_in_wavelength():
    _, samples = spectrum("R2", points=50)
    wavelengths = [s.wavelength for s in samples]
    assert wavelengths == sorted(wavelengths)
    assert all(s.transmission >= 0 for s in samples)


def test_synthesized_noise_is_seeded():
    _, first = spectrum("R2", points=50, noise_sigma=0.01, seed=3)
    _, second = spectrum("R2", points=50, noise_sigma=0.01, seed=3)
    _, clean = spectrum("R2", points=50)
    assert first == second
    assert first != clean
    with pytest.raises(FitError):
        spectrum("R2", points=50, noise_sigma=-0.1)


def test_initial_guess_locates_unsplit_dip():
    res = unsplit(builtin_resonance("R2"))
    grid = make_grid(res.omega0, 8 * linewidth(res), 400)
    guess = initial_guess(synthesize_spectrum(res, grid))
    assert abs(guess.omega0 - res.omega0) < 0.1 * linewidth(res)
    assert guess.c_norm == pytest.approx(res.c_norm, rel=0.02)


def test_initial_guess_sees_the_doublet():
    res, samples = spectrum("R3")
    guess = initial_guess(samples)
    assert guess.mu0 == pytest.approx(res.mu0, rel=0.5)
    assert abs(guess.omega0 - res.omega0) < linewidth(res)


def test_flat_spectrum_fits_without_resonance():
    samples = [
        SpectrumSample(wavelength=1550.0 + 0.01 * n, transmission=0.81)
        for n in range(60)
    ]
    result = fit_resonance(samples, options=FitOptions(starts=1))
    assert result.converged
    assert result.r_squared == 1.0
    assert result.params.kappa == 0.0
    assert result.params.c_norm == pytest.approx(0.9)


def test_too_few_samples():
    _, samples = spectrum("R2", points=10)
    with pytest.raises(FitError):
        fit_resonance(samples)


def test_unordered_samples():
    _, samples = spectrum("R2", points=40)
    samples[3], samples[4] = samples[4], samples[3]
    with pytest.raises(FitError):
        initial_guess(samples)


def test_fit_from_true_parameters_is_exact():
    res, samples = spectrum("R4", points=200)
    result = fit_resonance(samples, init=res, options=FitOptions(starts=0))
    assert result.converged
    assert result.r_squared > 0.9999
    assert result.residual_rms < 1e-6
    assert result.params.label == "R4"


@pytest.mark.slow
@pytest.mark.parametrize("name", ["R1", "R2", "R3", "R4"])
def test_fit_recovers_builtin_spectra(name):
    res, samples = spectrum(name)
    result = fit_resonance(samples)
    assert result.r_squared >= 0.998
    assert result.residual_rms < 1e-5
    assert abs(result.params.omega0 - res.omega0) < linewidth(res)


@pytest.mark.slow
def test_fit_tolerates_noise():
    _, samples = spectrum("R3", noise_sigma=0.005, seed=7)
    result = fit_resonance(samples)
    assert result.r_squared >= 0.99
    assert result.residual_rms < 0.01


def test_exact_start_skips_remaining_starts():
    res, samples = spectrum("R4", points=200)
    single = fit_resonance(samples, init=res, options=FitOptions(starts=0))
    many = fit_resonance(samples, init=res, options=FitOptions(starts=8))
    assert many.iterations == single.iterations
    assert many.residual_rms == single.residual_rms


@pytest.mark.slow
def test_more_starts_never_fit_worse():
    _, samples = spectrum("R1", noise_sigma=0.005, seed=11)
    single = fit_resonance(samples, options=FitOptions(starts=0))
    many = fit_resonance(samples, options=FitOptions(starts=4))
    assert many.residual_rms <= single.residual_rms + 1e-12


@pytest.mark.slow
def test_r_squared_falls_with_noise():
    scores = [
        fit_resonance(spectrum("R3", noise_sigma=sigma, seed=7)[1]).r_squared
        for sigma in (0.0, 0.002, 0.01, 0.03)
    ]
    assert scores == sorted(scores, reverse=True)


def test_fit_result_data():
    res, samples = spectrum("R2", points=100)
    data = fit_resonance(samples, init=res, options=FitOptions(starts=0)).data()
    assert {"C", "mu0_THz", "r_squared", "residual_rms", "converged"} <= set(data)


def test_spectrum_csv_round_trip(tmp_path):
    _, samples = spectrum("R1", points=30)
    path = tmp_path / "spectrum.csv"
    write_spectrum_csv(samples, path)
    assert path.read_text().splitlines()[0] == "wavelength_nm,transmission"
    loaded = read_spectrum_csv(path)
    assert len(loaded) == 30
    assert loaded[0].wavelength == pytest.approx(samples[0].wavelength, rel=1e-11)


def test_spectrum_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("wavelength_nm,transmission\n1550.0,0.5\n1550.1,abc\n")
    with pytest.raises(InputError) as info:
        read_spectrum_csv(path)
    assert info.value.line == 3

    path.write_text("wavelength_nm,transmission\n1550.0,0.5\n1550.1,-0.2\n")
    with pytest.raises(InputError) as info:
        read_spectrum_csv(path)
    assert info.value.line == 3

    path.write_text("")
    with pytest.raises(InputError):
        read_spectrum_csv(path)

    path.write_text("lambda,T\n1550.0,0.5\n")
    with pytest.raises(InputError):
        read_spectrum_csv(path)
