"""Operating points of the shipped source configurations."""

import numpy as np
import pytest

from biphoton.analysis import (
    analyze,
    marginal_fwhm,
    schmidt_decompose,
    sum_difference_marginals,
)
from biphoton.cli.run_config import Mode, RunConfig, count_adp_peaks, count_tdsi_peaks
from biphoton.config import Config
from biphoton.jsa import compute_adp, compute_jsa, compute_tdsi, default_sum_grid
from biphoton.resonator import DATA_DIR

pytestmark = pytest.mark.slow

UNSPLIT = {"pump_resonance.unsplit": True}


def shipped(name: str, **overrides):
    run = RunConfig(
        mode=Mode.SIMULATE, inputs=[DATA_DIR / f"{name}.json"], overrides=overrides
    )
    return run.source(Config())


def purity(
    name: str, method: str = "quadrature", flat_phase: bool = False, **overrides
) -> float:
    source, _ = shipped(name, **overrides)
    jsa = compute_jsa(source, method=method)
    return schmidt_decompose(jsa, flat_phase=flat_phase).purity


def adp_fwhm(name: str, **overrides) -> float:
    source, _ = shipped(name, **overrides)
    sum_grid = default_sum_grid(source)
    adp = compute_adp(source, sum_grid)
    return marginal_fwhm(sum_grid.points, np.abs(adp) ** 2)


def jsi_marginal_fwhms(name: str, **overrides):
    source, _ = shipped(name, **overrides)
    sums, sum_marginal, diffs, diff_marginal = sum_difference_marginals(
        compute_jsa(source).jsi()
    )
    return marginal_fwhm(sums, sum_marginal), marginal_fwhm(diffs, diff_marginal)


def test_separable_source_is_nearly_pure():
    assert 0.93 <= purity("separable") <= 0.98


@pytest.mark.parametrize("fwhm_pm, expected", [(148, 0.936), (210, 0.946)])
def test_flat_phase_purity_at_pump_bandwidth(fwhm_pm, expected):
    value = purity("separable", flat_phase=True, **{"pump.fwhm_pm": fwhm_pm})
    assert value == pytest.approx(expected, abs=0.02)


@pytest.mark.parametrize("fwhm_pm", [102, 148, 210, 226])
def test_unsplit_pump_purity_ceiling(fwhm_pm):
    assert purity("separable", **UNSPLIT, **{"pump.fwhm_pm": fwhm_pm}) <= 0.935


def test_separable_purity_agrees_between_methods():
    assert purity("separable", method="factorized") == pytest.approx(
        purity("separable"), abs=0.01
    )


def test_purity_grows_with_pump_bandwidth():
    narrow = purity("separable", **{"pump.fwhm_pm": 102})
    wide = purity("separable", **{"pump.fwhm_pm": 226})
    assert wide > narrow


def test_unsplit_pump_is_less_pure():
    split = purity("separable")
    plain = purity("separable", **UNSPLIT)
    assert plain < split


def test_purity_is_stable_under_grid_refinement():
    coarse = purity("separable", method="factorized")
    fine = purity("separable", method="factorized", **{"grid.count": 256})
    assert abs(fine - coarse) < 0.003


def test_split_pump_broadens_adp():
    split = adp_fwhm("separable")
    plain = adp_fwhm("separable", **UNSPLIT)
    assert split == pytest.approx(0.093, abs=0.005)
    assert plain == pytest.approx(0.071, abs=0.005)


def test_split_pump_broadens_sum_marginal():
    split, _ = jsi_marginal_fwhms("separable")
    plain, _ = jsi_marginal_fwhms("separable", **UNSPLIT)
    assert split > plain


def test_narrow_unsplit_pump_aligns_ridge_with_sum_axis():
    along_sum, along_difference = jsi_marginal_fwhms(
        "entangled_gaussian", **UNSPLIT, **{"pump.fwhm_pm": 20}
    )
    assert along_sum < along_difference


@pytest.mark.parametrize(
    "name, expected", [("entangled_gaussian", 4), ("separable", 1)]
)
def test_tdsi_peak_count(name, expected):
    source, _ = shipped(name)
    threshold = Config().get_float_option("peaks.tdsi_threshold")
    assert count_tdsi_peaks(compute_tdsi(source), threshold) == expected


def test_gaussian_pump_gives_two_correlated_peaks():
    source, document = shipped("entangled_gaussian")
    report = analyze(compute_jsa(source), threshold=document["peaks"]["threshold"])
    assert len(report.peaks) == 2
    for peak in report.peaks:
        # pairs sit on ν_s + ν_i ≈ 0: the detunings have opposite signs
        assert np.sign(peak.d_lambda_s) == -np.sign(peak.d_lambda_i)
    assert report.schmidt.purity < purity("separable")


def test_gaussian_pump_schmidt_weights():
    source, _ = shipped("entangled_gaussian")
    weights = schmidt_decompose(compute_jsa(source)).weights
    assert weights[0] == pytest.approx(0.91, abs=0.05)
    assert weights[1] == pytest.approx(0.09, abs=0.05)


def test_differentiated_pump_gives_four_peaks():
    source, document = shipped("entangled_diff")
    report = analyze(compute_jsa(source), threshold=document["peaks"]["threshold"])
    assert len(report.peaks) == 4


@pytest.mark.parametrize("overrides", [{}, UNSPLIT])
def test_differentiated_pump_gives_three_adp_peaks(overrides):
    source, _ = shipped("entangled_diff", **overrides)
    adp = compute_adp(source, default_sum_grid(source))
    threshold = Config().get_float_option("peaks.adp_threshold")
    assert count_adp_peaks(adp, threshold) == 3
