"""Unit conversions and discretisation grids.

Internal frequencies are angular frequencies in rad/ps, numerically the "THz" used for
the fitted resonance parameters (1217.85 rad/ps is 1546.70 nm). Wavelengths only appear
at file boundaries.
"""

import math
from typing import Annotated, Any, Dict, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field

SPEED_OF_LIGHT = 299792.458
"""Speed of light in nm/ps."""

AngularFrequency = Annotated[float, Field(gt=0)]
"""Carrier angular frequency in rad/ps."""

FloatOrArray = Union[float, np.ndarray]


class GridError(ValueError):
    pass


def _positive(value: ArrayLike, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(arr > 0):
        raise GridError(f"{name} must be positive, got {value}")
    return arr


def _unwrap(arr: np.ndarray) -> FloatOrArray:
    return float(arr) if arr.ndim == 0 else arr


def wavelength_to_omega(wavelength: ArrayLike) -> FloatOrArray:
    """
    Convert a vacuum wavelength in nm to an angular frequency in rad/ps.

    :param wavelength: wavelength(s) in nm, must be positive
    :return: angular frequency ω = 2πc/λ
    :raise GridError: if any wavelength is not positive
    """
    lam = _positive(wavelength, "wavelength")
    return _unwrap(2.0 * math.pi * SPEED_OF_LIGHT / lam)


def omega_to_wavelength(omega: ArrayLike) -> FloatOrArray:
    """
    Convert an angular frequency in rad/ps to a vacuum wavelength in nm.

    :param omega: angular frequency (or frequencies), must be positive
    :return: wavelength λ = 2πc/ω in nm
    :raise GridError: if any frequency is not positive
    """
    w = _positive(omega, "angular frequency")
    return _unwrap(2.0 * math.pi * SPEED_OF_LIGHT / w)


def bandwidth_pm_to_omega(fwhm_pm: float, center: float) -> float:
    """Angular bandwidth (rad/ps) of a bandwidth in pm at the given carrier."""
    if fwhm_pm <= 0:
        raise GridError(f"bandwidth must be positive, got {fwhm_pm} pm")
    lam = omega_to_wavelength(center)
    return 2.0 * math.pi * SPEED_OF_LIGHT * (fwhm_pm * 1e-3) / lam**2


def omega_detuning_to_wavelength(nu: ArrayLike, center: float) -> FloatOrArray:
    """Wavelength detuning λ(center + ν) − λ(center) in nm."""
    nu = np.asarray(nu, dtype=float)
    return _unwrap(omega_to_wavelength(center + nu) - omega_to_wavelength(center))


def wavelength_detuning_to_omega(d_lambda: ArrayLike, center: float) -> FloatOrArray:
    """Inverse of :func:`omega_detuning_to_wavelength`."""
    d_lambda = np.asarray(d_lambda, dtype=float)
    lam0 = omega_to_wavelength(center)
    return _unwrap(wavelength_to_omega(lam0 + d_lambda) - center)


class DetuningGrid1D(BaseModel):
    """Uniform grid of detunings (rad/ps) about a carrier, symmetric about zero."""

    model_config = ConfigDict(frozen=True)

    center: AngularFrequency
    """Carrier the detunings are measured from."""
    half_width: float = Field(gt=0)
    """Largest detuning magnitude in rad/ps."""
    count: int = Field(ge=2)
    """Number of samples, endpoints included."""

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        # half-integer offsets keep points[i] == -points[count - 1 - i] exactly
        return (np.arange(self.count) - (self.count - 1) / 2.0) * self.step

    @property
    def absolute(self) -> np.ndarray:
        return self.center + self.points

    def refined(self, factor: int) -> "DetuningGrid1D":
        """Same extent with (count - 1) * factor intervals."""
        return make_grid(self.center, self.half_width, (self.count - 1) * factor + 1)

    @classmethod
    def from_points(
        cls, center: float, points: Sequence[float], rtol: float = 1e-9
    ) -> "DetuningGrid1D":
        """
        Build a grid from sampled detunings.

        The samples must be strictly increasing and uniformly spaced within ``rtol``.
        An off-centre sample set is re-centred: the returned grid's carrier is moved to
        the middle of the samples.

        :raise GridError: if the samples are too few, unordered or non-uniform
        """
        arr = np.asarray(points, dtype=float)
        if arr.ndim != 1 or arr.size < 2:
            raise GridError("a grid needs at least two points")
        diffs = np.diff(arr)
        if not np.all(diffs > 0):
            raise GridError("grid points must be strictly increasing")
        mean_step = diffs.mean()
        if np.max(np.abs(diffs - mean_step)) > rtol * mean_step:
            raise GridError("non-uniform grid spacing is not supported")
        offset = 0.5 * (arr[0] + arr[-1])
        return cls(
            center=center + offset,
            half_width=0.5 * (arr[-1] - arr[0]),
            count=arr.size,
        )


def make_grid(center: float, half_width: float, count: int) -> DetuningGrid1D:
    """
    Create a symmetric uniform detuning grid.

    :param center: carrier angular frequency in rad/ps
    :param half_width: extent on each side of the carrier in rad/ps
    :param count: number of points (at least 2)
    :raise GridError: on a non-positive half width or fewer than two points
    """
    if count < 2:
        raise GridError(f"a grid needs at least two points, got {count}")
    if half_width <= 0:
        raise GridError(f"half width must be positive, got {half_width}")
    return DetuningGrid1D(center=center, half_width=half_width, count=count)


class Grid2D:
    """
    Values sampled on a signal × idler detuning grid.

    Rows follow the signal axis, columns the idler axis.
    """

    def __init__(
        self,
        signal_axis: DetuningGrid1D,
        idler_axis: DetuningGrid1D,
        values: ArrayLike,
    ) -> None:
        values = np.asarray(values)
        if values.shape != (signal_axis.count, idler_axis.count):
            raise GridError(
                f"values shape {values.shape} does not match axes "
                f"({signal_axis.count}, {idler_axis.count})"
            )
        self.signal_axis = signal_axis
        self.idler_axis = idler_axis
        self.values = values

    @property
    def shape(self):
        return self.values.shape

    @property
    def cell_area(self) -> float:
        return self.signal_axis.step * self.idler_axis.step

    def with_values(self, values: ArrayLike) -> "Grid2D":
        return Grid2D(self.signal_axis, self.idler_axis, values)

    def wavelength_axes(self):
        """Signal and idler axes as wavelength detunings (nm) from their carriers."""
        return tuple(
            omega_detuning_to_wavelength(axis.points, axis.center)
            for axis in (self.signal_axis, self.idler_axis)
        )

    def data(self) -> Dict[str, Any]:
        return {
            "signal_axis": self.signal_axis.model_dump(),
            "idler_axis": self.idler_axis.model_dump(),
            "values": self.values,
        }
