"""Biphoton joint spectral amplitude of a split-resonance ring source.

The amplitude over signal and idler frequencies is

    F(ω_s, ω_i) = √N · φ_PM(ω_s, ω_i) · TDSI(ω_s, ω_i) · ∫ dω_p P(ω_p, ω_s + ω_i − ω_p)

where the signal/idler filter is

    TDSI = l_sf(ω_s) l_if(ω_i) + γ_s γ_i l_sb(ω_s) l_ib(ω_i)

and the pump pair term is

    P(ω_p, ω') = α_p(ω_p) α_p(ω') [l_pf(ω_p) l_pf(ω') + γ_p² l_pb(ω_p) l_pb(ω')].

The ω_p integral depends on ω_s + ω_i only; as a function of the sum frequency it is
the antidiagonal pump (ADP) function, a weighted sum of two auto-convolutions of the
resonance-enhanced pump spectrum. Two evaluation paths are offered: trapezoid quadrature
over ω_p for every pixel, and a factorised form that takes the ADP from one discrete
convolution.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from .phasematch import PhaseMatchSpec, phi_pm_absolute
from .pump import PumpSpec, pump_envelope
from .resonator import (
    SplitResonance,
    enhancement_backward,
    enhancement_forward,
    linewidth,
)
from .units import DetuningGrid1D, Grid2D, GridError, make_grid

logger = logging.getLogger(__name__)

ENERGY_WARNING_LINEWIDTHS = 3.0
ENERGY_ERROR_LINEWIDTHS = 10.0

WINDOW_PUMP_LINEWIDTHS = 6.0
WINDOW_PUMP_FWHM = 3.0

DEFAULT_COUNT = 128
DEFAULT_HALF_WIDTH_LINEWIDTHS = 6.0


class EnergyMatchingError(ValueError):
    """The pump resonance is too far from the signal/idler energy-conservation point."""

    pass


class SourceConfig(BaseModel):
    """Everything needed to compute the biphoton state of one source."""

    model_config = ConfigDict(frozen=True)

    pump_res: SplitResonance
    signal_res: SplitResonance
    idler_res: SplitResonance
    pump: PumpSpec
    pm: PhaseMatchSpec
    signal_grid: DetuningGrid1D
    idler_grid: DetuningGrid1D
    pump_quadrature_points: int = Field(default=257, ge=64)
    adp_oversample: int = Field(default=4, ge=1)
    """Sampling refinement of the pump lattice used by the factorised path."""
    quadrature_half_width: Optional[float] = Field(default=None, gt=0)
    """Half width of the ω_p integration window; see :func:`pump_window`."""


def default_grids(
    signal_res: SplitResonance,
    idler_res: SplitResonance,
    count: int = DEFAULT_COUNT,
    half_width_linewidths: float = DEFAULT_HALF_WIDTH_LINEWIDTHS,
) -> Tuple[DetuningGrid1D, DetuningGrid1D]:
    """Signal and idler grids spanning a number of linewidths around each resonance."""
    return tuple(
        make_grid(res.omega0, half_width_linewidths * linewidth(res), count)
        for res in (signal_res, idler_res)
    )


def check_energy_matching(cfg: SourceConfig) -> float:
    """
    Mismatch |2ω_p − ω_s − ω_i| between the resonances, in rad/ps.

    Logs a warning above 3 linewidths (largest of the three resonances).

    :raise EnergyMatchingError: above 10 linewidths
    """
    mismatch = abs(
        2.0 * cfg.pump_res.omega0 - cfg.signal_res.omega0 - cfg.idler_res.omega0
    )
    width = max(linewidth(r) for r in (cfg.pump_res, cfg.signal_res, cfg.idler_res))
    if mismatch > ENERGY_ERROR_LINEWIDTHS * width:
        raise EnergyMatchingError(
            f"resonances are {mismatch / width:.1f} linewidths from energy matching "
            f"(|2ω_p − ω_s − ω_i| = {mismatch:.4f} rad/ps)"
        )
    if mismatch > ENERGY_WARNING_LINEWIDTHS * width:
        logger.warning(
            "resonances are %.1f linewidths from energy matching", mismatch / width
        )
    return mismatch


def pump_window(cfg: SourceConfig) -> float:
    """
    Half width of the ω_p integration window around the pump carrier.

    ±max(6 pump-resonance linewidths, 3 pump FWHM) unless overridden.
    """
    if cfg.quadrature_half_width is not None:
        return cfg.quadrature_half_width
    return max(
        WINDOW_PUMP_LINEWIDTHS * linewidth(cfg.pump_res),
        WINDOW_PUMP_FWHM * cfg.pump.fwhm_omega,
    )


class JsaGrid:
    """
    Normalised joint spectral amplitude.

    ``norm`` is the √N prefactor that was applied to the raw amplitude.
    """

    def __init__(
        self,
        grid: Grid2D,
        norm: float,
        meta: SourceConfig,
        window_warning: bool = False,
        method: str = "quadrature",
    ) -> None:
        self.grid = grid
        self.norm = norm
        self.meta = meta
        self.window_warning = window_warning
        self.method = method

    @property
    def values(self) -> np.ndarray:
        return self.grid.values

    def jsi(self) -> Grid2D:
        return self.grid.with_values(np.abs(self.grid.values) ** 2)

    def integral(self) -> float:
        """Trapezoid integral of |F|² over the grid."""
        return integrate_grid(self.jsi())

    def data(self) -> dict:
        return {
            "method": self.method,
            "norm": self.norm,
            "window_warning": self.window_warning,
            "signal_axis": self.grid.signal_axis,
            "idler_axis": self.grid.idler_axis,
        }


def integrate_grid(grid: Grid2D) -> float:
    inner = integrate.trapezoid(grid.values, dx=grid.idler_axis.step, axis=1)
    return float(np.real(integrate.trapezoid(inner, dx=grid.signal_axis.step)))


def _normalised(cfg: SourceConfig, raw: np.ndarray, warning: bool, method: str):
    grid = Grid2D(cfg.signal_grid, cfg.idler_grid, raw)
    total = integrate_grid(grid.with_values(np.abs(raw) ** 2))
    if not total > 0:
        raise GridError("joint spectral amplitude vanishes on the grid")
    norm = 1.0 / math.sqrt(total)
    return JsaGrid(grid.with_values(raw * norm), norm, cfg, warning, method)


def _enhanced_pump(cfg: SourceConfig, omega: np.ndarray):
    """Forward and backward resonance-enhanced pump spectra α_p·l_pf, α_p·l_pb."""
    alpha = pump_envelope(cfg.pump, omega)
    return (
        alpha * enhancement_forward(cfg.pump_res, omega),
        alpha * enhancement_backward(cfg.pump_res, omega),
    )


def compute_tdsi(cfg: SourceConfig) -> Grid2D:
    """Signal/idler filter l_sf·l_if + γ_sγ_i·l_sb·l_ib on the configured grid."""
    omega_s = cfg.signal_grid.absolute
    omega_i = cfg.idler_grid.absolute
    values = np.outer(
        enhancement_forward(cfg.signal_res, omega_s),
        enhancement_forward(cfg.idler_res, omega_i),
    )
    weight = cfg.signal_res.gamma * cfg.idler_res.gamma
    if weight != 0:
        values = values + weight * np.outer(
            enhancement_backward(cfg.signal_res, omega_s),
            enhancement_backward(cfg.idler_res, omega_i),
        )
    return Grid2D(cfg.signal_grid, cfg.idler_grid, values)


def _adp_lattice(cfg: SourceConfig, step: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    ADP sampled on the sum-frequency lattice 2ω_pc + m·step.

    :return: (sum-frequency offsets m·step from 2ω_pc, complex ADP values)
    """
    half = int(math.ceil(pump_window(cfg) / step))
    offsets = np.arange(-half, half + 1) * step
    forward, backward = _enhanced_pump(cfg, cfg.pump.center + offsets)
    values = np.convolve(forward, forward) * step
    gamma_sq = cfg.pump_res.gamma**2
    if gamma_sq != 0:
        values = values + gamma_sq * np.convolve(backward, backward) * step
    sums = np.arange(-2 * half, 2 * half + 1) * step
    return sums, values


def compute_adp(cfg: SourceConfig, nu_sum_grid: DetuningGrid1D) -> np.ndarray:
    """
    ADP(ω_s + ω_i) at the absolute sum frequencies of ``nu_sum_grid``.

    The pump is sampled at half the grid spacing around its carrier, so every grid
    point must fall on the lattice 2ω_pc + m·step/2.

    :raise GridError: if the sum-frequency grid is not aligned with that lattice
    """
    check_energy_matching(cfg)
    step = 0.5 * nu_sum_grid.step
    offsets = (nu_sum_grid.absolute - 2.0 * cfg.pump.center) / step
    index = np.rint(offsets)
    if np.max(np.abs(offsets - index)) > 1e-6:
        raise GridError(
            "sum-frequency grid is not aligned with the pump sampling lattice "
            "centred on twice the pump carrier"
        )
    sums, values = _adp_lattice(cfg, step)
    centre = (sums.size - 1) // 2
    position = index.astype(int) + centre
    inside = (position >= 0) & (position < sums.size)
    result = np.zeros(nu_sum_grid.count, dtype=complex)
    result[inside] = values[position[inside]]
    return result


def default_sum_grid(cfg: SourceConfig) -> DetuningGrid1D:
    """Sum-frequency grid centred on 2ω_pc covering every ω_s + ω_i of the JSA grid."""
    step = min(cfg.signal_grid.step, cfg.idler_grid.step)
    centre = 2.0 * cfg.pump.center
    reach = (
        abs(cfg.signal_grid.center + cfg.idler_grid.center - centre)
        + cfg.signal_grid.half_width
        + cfg.idler_grid.half_width
    )
    half_count = int(math.ceil(reach / step))
    return make_grid(centre, half_count * step, 2 * half_count + 1)


def _quadrature_row(
    cfg: SourceConfig,
    omega_p: np.ndarray,
    pump_f: np.ndarray,
    pump_b: np.ndarray,
    omega_s: float,
) -> np.ndarray:
    omega_i = cfg.idler_grid.absolute
    partner = (omega_s + omega_i)[:, None] - omega_p[None, :]
    partner_f, partner_b = _enhanced_pump(cfg, partner)
    integrand = pump_f[None, :] * partner_f
    gamma_sq = cfg.pump_res.gamma**2
    if gamma_sq != 0:
        integrand = integrand + gamma_sq * pump_b[None, :] * partner_b
    step = float(omega_p[1] - omega_p[0])
    adp = integrate.trapezoid(integrand, dx=step, axis=1)
    return adp * phi_pm_absolute(cfg.pm, omega_s, omega_i)


def compute_jsa_quadrature(cfg: SourceConfig, threads: int = 1) -> JsaGrid:
    """
    Joint spectral amplitude by trapezoid quadrature over the pump frequency.

    Rows of the signal axis are independent and may be spread over ``threads``
    workers; each row is summed in the same order whatever the thread count.
    """
    check_energy_matching(cfg)
    half_width = pump_window(cfg)
    warning = half_width < WINDOW_PUMP_LINEWIDTHS * linewidth(cfg.pump_res)
    if warning:
        logger.warning(
            "quadrature window ±%.4f rad/ps is narrower than %d pump linewidths",
            half_width,
            WINDOW_PUMP_LINEWIDTHS,
        )
    omega_p = cfg.pump.center + np.linspace(
        -half_width, half_width, cfg.pump_quadrature_points
    )
    pump_f, pump_b = _enhanced_pump(cfg, omega_p)

    def row(omega_s: float) -> np.ndarray:
        return _quadrature_row(cfg, omega_p, pump_f, pump_b, omega_s)

    signal = cfg.signal_grid.absolute
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, signal))
    else:
        rows = [row(w) for w in signal]
    raw = np.array(rows) * compute_tdsi(cfg).values
    return _normalised(cfg, raw, warning, "quadrature")


def compute_jsa_factorized(cfg: SourceConfig) -> JsaGrid:
    """
    Joint spectral amplitude as φ_PM · TDSI · ADP(ω_s + ω_i).

    The ADP comes from one discrete auto-convolution on a pump lattice
    ``adp_oversample`` times finer than the JSA grid and is linearly interpolated onto
    the sum frequencies of the grid.
    """
    check_energy_matching(cfg)
    step = min(cfg.signal_grid.step, cfg.idler_grid.step) / cfg.adp_oversample
    sums, adp = _adp_lattice(cfg, step)
    omega_s, omega_i = np.meshgrid(
        cfg.signal_grid.absolute, cfg.idler_grid.absolute, indexing="ij"
    )
    target = omega_s + omega_i - 2.0 * cfg.pump.center
    adp_grid = np.interp(target, sums, adp.real, left=0, right=0) + 1j * np.interp(
        target, sums, adp.imag, left=0, right=0
    )
    raw = phi_pm_absolute(cfg.pm, omega_s, omega_i) * compute_tdsi(cfg).values
    return _normalised(cfg, raw * adp_grid, False, "factorized")


def compute_jsa(cfg: SourceConfig, method: str = "quadrature", threads: int = 1):
    if method == "quadrature":
        return compute_jsa_quadrature(cfg, threads=threads)
    elif method == "factorized":
        return compute_jsa_factorized(cfg)
    raise ValueError(f"unknown JSA method {method}")
