"""Phase matching under the linear dispersion approximation.

Δk = τ_s·ν_s + τ_i·ν_i − γ(P − P₀)
φ_PM = sinc(LΔk/2)·exp(iLΔk/2)

τ_x = k⁽¹⁾_p − k⁽¹⁾_x are group-velocity mismatches in ps/µm, ν_x detunings in rad/ps
from the perfectly phase-matched anchors ω_x⁰, so Δk comes out in rad/µm.
"""

import math
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field

from .io import InputError, read_table
from .units import (
    AngularFrequency,
    DetuningGrid1D,
    Grid2D,
    omega_to_wavelength,
    wavelength_to_omega,
)

DEFAULT_LENGTH = 2.0 * math.pi * 15.0
"""Circumference of a 15 µm radius ring, in µm."""

DISPERSION_HEADER = ("lambda_nm", "k1_ps_per_um")


class PhaseMatchSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    length: float = Field(default=DEFAULT_LENGTH, gt=0)
    """Interaction length L in µm."""
    tau_s: float = 0.0
    """k⁽¹⁾_p − k⁽¹⁾_s in ps/µm."""
    tau_i: float = 0.0
    """k⁽¹⁾_p − k⁽¹⁾_i in ps/µm."""
    gamma_nl: float = 0.0
    """Nonlinear parameter γ in 1/(W·µm)."""
    peak_power: float = Field(default=0.0, ge=0)
    """Pump peak power P in W."""
    reference_power: Optional[float] = Field(default=None, ge=0)
    """Power P₀ at which the anchors are phase matched; defaults to ``peak_power``."""
    omega_s0: AngularFrequency
    omega_i0: AngularFrequency

    @property
    def power_shift(self) -> float:
        """The −γ(P − P₀) contribution to Δk."""
        if self.reference_power is None:
            return 0.0
        return -self.gamma_nl * (self.peak_power - self.reference_power)


def delta_k_linear(spec: PhaseMatchSpec, nu_s: ArrayLike, nu_i: ArrayLike):
    """Linearised phase mismatch in rad/µm for detunings from the anchors."""
    dk = (
        spec.tau_s * np.asarray(nu_s, dtype=float)
        + spec.tau_i * np.asarray(nu_i, dtype=float)
        + spec.power_shift
    )
    return float(dk) if np.ndim(dk) == 0 else dk


def phi_pm(spec: PhaseMatchSpec, nu_s: ArrayLike, nu_i: ArrayLike):
    """Phase-matching function for detunings from the anchors."""
    half = 0.5 * spec.length * np.asarray(delta_k_linear(spec, nu_s, nu_i))
    # numpy's sinc is sin(πx)/(πx)
    value = np.sinc(half / math.pi) * np.exp(1j * half)
    return complex(value) if np.ndim(value) == 0 else value


def phi_pm_absolute(spec: PhaseMatchSpec, omega_s: ArrayLike, omega_i: ArrayLike):
    """Phase-matching function at absolute signal and idler frequencies."""
    nu_s = np.asarray(omega_s, dtype=float) - spec.omega_s0
    nu_i = np.asarray(omega_i, dtype=float) - spec.omega_i0
    return phi_pm(spec, nu_s, nu_i)


def orientation_angle(spec: PhaseMatchSpec) -> float:
    """
    Tilt θ_si = −arctan(τ_s/τ_i) of the phase-matching ridge, in degrees.

    For τ_i = 0 the ridge is vertical: −90° times the sign of τ_s (0° if τ_s is zero
    as well).
    """
    return ridge_angle(spec.tau_s, spec.tau_i)


def ridge_angle(tau_s: ArrayLike, tau_i: ArrayLike):
    """θ_si in degrees from group-velocity mismatches; see :func:`orientation_angle`."""
    tau_s = np.asarray(tau_s, dtype=float)
    tau_i = np.asarray(tau_i, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = -np.degrees(np.arctan(tau_s / tau_i))
    theta = np.where(tau_i == 0, -90.0 * np.sign(tau_s), theta)
    return float(theta) if theta.ndim == 0 else theta


def phase_matching_grid(
    spec: PhaseMatchSpec, signal_grid: DetuningGrid1D, idler_grid: DetuningGrid1D
) -> Grid2D:
    """φ_PM sampled on a signal × idler grid of absolute frequencies."""
    omega_s, omega_i = np.meshgrid(
        signal_grid.absolute, idler_grid.absolute, indexing="ij"
    )
    return Grid2D(signal_grid, idler_grid, phi_pm_absolute(spec, omega_s, omega_i))


class DispersionTable:
    """First-order dispersion k⁽¹⁾ = dk/dω sampled against wavelength."""

    def __init__(self, wavelength: ArrayLike, k1: ArrayLike) -> None:
        wavelength = np.asarray(wavelength, dtype=float)
        k1 = np.asarray(k1, dtype=float)
        if wavelength.shape != k1.shape or wavelength.ndim != 1 or wavelength.size < 2:
            raise ValueError("dispersion table needs at least two matching samples")
        order = np.argsort(wavelength)
        self.wavelength = wavelength[order]
        self.k1_values = k1[order]
        if np.any(np.diff(self.wavelength) <= 0):
            raise ValueError("dispersion table wavelengths must be distinct")

    def k1(self, wavelength: ArrayLike):
        """Linearly interpolated k⁽¹⁾ in ps/µm."""
        lam = np.asarray(wavelength, dtype=float)
        if np.any(lam < self.wavelength[0]) or np.any(lam > self.wavelength[-1]):
            raise ValueError(
                f"wavelength outside dispersion table range "
                f"[{self.wavelength[0]}, {self.wavelength[-1]}] nm"
            )
        value = np.interp(lam, self.wavelength, self.k1_values)
        return float(value) if np.ndim(value) == 0 else value


def load_dispersion(path: Union[str, Path]) -> DispersionTable:
    """Read a ``lambda_nm,k1_ps_per_um`` CSV file."""
    table = read_table(path, DISPERSION_HEADER)
    try:
        return DispersionTable(table["lambda_nm"], table["k1_ps_per_um"])
    except ValueError as err:
        raise InputError(f"{path}: {err}") from err


def group_velocity_mismatch(
    table: DispersionTable, pump_nm: float, signal_nm: float, idler_nm: float
) -> Tuple[float, float]:
    """(τ_s, τ_i) = (k⁽¹⁾_p − k⁽¹⁾_s, k⁽¹⁾_p − k⁽¹⁾_i) in ps/µm."""
    k1_p = table.k1(pump_nm)
    return k1_p - table.k1(signal_nm), k1_p - table.k1(idler_nm)


def orientation_map(
    table: DispersionTable,
    pump_wavelengths: Sequence[float],
    idler_offsets: Sequence[float],
) -> np.ndarray:
    """
    θ_si over pump wavelength × idler offset (λ_i − λ_p, nm).

    The signal wavelength follows from energy conservation 2ω_p = ω_s + ω_i.

    :return: array of angles in degrees, rows following ``pump_wavelengths``
    """
    lam_p = np.asarray(pump_wavelengths, dtype=float)[:, None]
    lam_i = lam_p + np.asarray(idler_offsets, dtype=float)[None, :]
    omega_s = 2.0 * wavelength_to_omega(lam_p) - wavelength_to_omega(lam_i)
    lam_s = omega_to_wavelength(omega_s)
    k1_p = table.k1(np.broadcast_to(lam_p, lam_i.shape))
    tau_s = k1_p - table.k1(lam_s)
    tau_i = k1_p - table.k1(lam_i)
    return np.asarray(ridge_angle(tau_s, tau_i))
