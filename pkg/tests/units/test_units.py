import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biphoton.units import (
    DetuningGrid1D,
    Grid2D,
    GridError,
    bandwidth_pm_to_omega,
    make_grid,
    omega_detuning_to_wavelength,
    omega_to_wavelength,
    wavelength_detuning_to_omega,
    wavelength_to_omega,
)


def test_wavelength_to_omega():
    assert wavelength_to_omega(1546.70) == pytest.approx(1217.85, abs=0.01)
    assert isinstance(wavelength_to_omega(1546.70), float)


def test_wavelength_to_omega_array():
    omega = wavelength_to_omega(np.array([1500.0, 1550.0, 1600.0]))
    assert omega.shape == (3,)
    assert np.all(np.diff(omega) < 0)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_non_positive_wavelength_rejected(bad):
    with pytest.raises(GridError):
        wavelength_to_omega(bad)
    with pytest.raises(GridError):
        omega_to_wavelength(bad)


@given(st.floats(min_value=400.0, max_value=3000.0))
def test_wavelength_round_trip(lam):
    assert omega_to_wavelength(wavelength_to_omega(lam)) == pytest.approx(
        lam, rel=1e-12
    )


def test_bandwidth_pm_to_omega():
    center = wavelength_to_omega(1546.70)
    assert bandwidth_pm_to_omega(100.0, center) == pytest.approx(0.0787, abs=1e-4)
    with pytest.raises(GridError):
        bandwidth_pm_to_omega(0.0, center)


def test_detuning_sign():
    center = wavelength_to_omega(1550.0)
    assert omega_detuning_to_wavelength(0.1, center) < 0
    assert omega_detuning_to_wavelength(-0.1, center) > 0
    assert omega_detuning_to_wavelength(0.0, center) == pytest.approx(0.0, abs=1e-12)


def test_detuning_inverse():
    center = wavelength_to_omega(1550.0)
    d_lambda = omega_detuning_to_wavelength(0.05, center)
    assert wavelength_detuning_to_omega(d_lambda, center) == pytest.approx(
        0.05, rel=1e-9
    )


def test_make_grid():
    grid = make_grid(1000.0, 1.0, 5)
    assert grid.step == pytest.approx(0.5)
    np.testing.assert_allclose(grid.points, [-1.0, -0.5, 0.0, 0.5, 1.0])
    np.testing.assert_allclose(grid.absolute, 1000.0 + grid.points)


def test_make_grid_is_exactly_symmetric():
    points = make_grid(1217.85, 0.2004, 128).points
    assert np.array_equal(points, -points[::-1])


@pytest.mark.parametrize("half_width, count", [(1.0, 1), (0.0, 5), (-1.0, 5)])
def test_make_grid_invalid(half_width, count):
    with pytest.raises(GridError):
        make_grid(1000.0, half_width, count)


def test_refined_grid_keeps_extent():
    grid = make_grid(1000.0, 1.0, 5).refined(4)
    assert grid.count == 17
    assert grid.half_width == 1.0
    assert grid.step == pytest.approx(0.125)


def test_from_points_recentres():
    grid = DetuningGrid1D.from_points(1000.0, [0.1, 0.2, 0.3])
    assert grid.center == pytest.approx(1000.2)
    assert grid.half_width == pytest.approx(0.1)
    assert grid.count == 3


@pytest.mark.parametrize("points", [[0.0], [0.0, 0.1, 0.3], [0.2, 0.1, 0.0]])
def test_from_points_invalid(points):
    with pytest.raises(GridError):
        DetuningGrid1D.from_points(1000.0, points)


def test_grid2d_shape_checked():
    s = make_grid(1000.0, 1.0, 3)
    i = make_grid(1100.0, 1.0, 4)
    grid = Grid2D(s, i, np.zeros((3, 4)))
    assert grid.shape == (3, 4)
    assert grid.cell_area == pytest.approx(1.0 * 2.0 / 3.0)
    with pytest.raises(GridError):
        Grid2D(s, i, np.zeros((4, 3)))


def test_grid2d_wavelength_axes():
    s = make_grid(1000.0, 0.1, 5)
    i = make_grid(1100.0, 0.1, 7)
    ls, li = Grid2D(s, i, np.zeros((5, 7))).wavelength_axes()
    assert ls.shape == (5,)
    assert li.shape == (7,)
    assert ls[2] == pytest.approx(0.0, abs=1e-12)
    assert ls[0] > 0 > ls[-1]
    assert li[0] == pytest.approx(omega_detuning_to_wavelength(-0.1, 1100.0))
    assert math.isclose(li[3], 0.0, abs_tol=1e-12)
