"""Pump spectral envelopes and temporal differentiators.

The pump is a Gaussian pulse whose power spectrum has a given wavelength FWHM. It can be
reshaped by an all-pass micro-ring (a fractional-order temporal differentiator) or by an
ideal differentiator with transfer function [i(ω − ω₀)]^N.
"""

import logging
import math
from typing import Annotated, Literal, Optional, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field

from .units import AngularFrequency, GridError, bandwidth_pm_to_omega

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT_UM = 299.792458
"""Speed of light in µm/ps."""

# Default differentiating ring: 30 µm radius, group index 4.2. At order 1.7 over the
# pump resonance its linewidth is about 2/5 of the photon-pair ring's.
DEFAULT_RING_RADIUS = 30.0
DEFAULT_GROUP_INDEX = 4.2
DEFAULT_ROUND_TRIP_LOSS = 0.993
DEFAULT_ORDER = 1.7

REGRESSION_POINTS = 64
PHASE_POINTS = 4096


class DifferentiatorError(ValueError):
    pass


class DifferentiatorSpec(BaseModel):
    """All-pass micro-ring used as a temporal differentiator."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["mrr"] = "mrr"
    tau_c: float = Field(gt=0, lt=1)
    """Self-coupling coefficient."""
    alpha_rt: float = Field(gt=0, le=1)
    """Round-trip amplitude transmission."""
    t_s: float = Field(gt=0)
    """Round-trip delay in ps."""
    omega_align: AngularFrequency
    """Angular frequency of the ring resonance aligned to the pump."""

    @property
    def free_spectral_range(self) -> float:
        return 2.0 * math.pi / self.t_s


class IdealDiff(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["ideal"] = "ideal"
    order: float = Field(gt=0)
    omega0: AngularFrequency


Transform = Annotated[Union[DifferentiatorSpec, IdealDiff], Field(discriminator="kind")]


class PumpSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    center: AngularFrequency
    """Carrier angular frequency in rad/ps."""
    fwhm_wavelength: float = Field(gt=0)
    """Power-spectrum FWHM in pm."""
    shape: Literal["gaussian"] = "gaussian"
    transform: Optional[Transform] = None

    @property
    def fwhm_omega(self) -> float:
        """Angular power-spectrum FWHM in rad/ps."""
        return bandwidth_pm_to_omega(self.fwhm_wavelength, self.center)

    @property
    def sigma(self) -> float:
        """Amplitude Gaussian width σ, with |α|² = exp(−(ω − ω_c)²/σ²)."""
        return self.fwhm_omega / (2.0 * math.sqrt(math.log(2.0)))


def mrr_diff_transfer(spec: DifferentiatorSpec, omega: ArrayLike):
    """
    Through-port transfer function of the all-pass ring.

    H(ω) = (τ_c − α e^{−ix}) / (1 − τ_c α e^{−ix}) with x = (ω − ω_align)·T_s.
    A resonance sits on ``omega_align`` and repeats every free spectral range.
    """
    x = (np.asarray(omega, dtype=float) - spec.omega_align) * spec.t_s
    phasor = np.exp(-1j * x)
    loop = spec.tau_c * spec.alpha_rt * phasor
    h = (spec.tau_c - spec.alpha_rt * phasor) / (1.0 - loop)
    return complex(h) if np.ndim(h) == 0 else h


def ideal_diff_transfer(spec: IdealDiff, omega: ArrayLike):
    """[i(ω − ω₀)]^N on the principal branch."""
    x = np.asarray(omega, dtype=float) - spec.omega0
    h = np.abs(x) ** spec.order * np.exp(0.5j * math.pi * spec.order * np.sign(x))
    return complex(h) if np.ndim(h) == 0 else h


def transfer(transform: Union[DifferentiatorSpec, IdealDiff], omega: ArrayLike):
    if isinstance(transform, DifferentiatorSpec):
        return mrr_diff_transfer(transform, omega)
    return ideal_diff_transfer(transform, omega)


def pump_envelope(spec: PumpSpec, omega: ArrayLike):
    """
    Complex spectral amplitude α_p(ω) of the pump, unit height at the carrier.

    :param spec: the pump
    :param omega: absolute angular frequency (scalar or array)
    """
    nu = np.asarray(omega, dtype=float) - spec.center
    envelope = np.exp(-(nu**2) / (2.0 * spec.sigma**2)).astype(complex)
    if spec.transform is not None:
        envelope = envelope * transfer(spec.transform, omega)
    return complex(envelope) if np.ndim(envelope) == 0 else envelope


def pump_spectrum(spec: PumpSpec, grid) -> np.ndarray:
    """Sampled envelope on the absolute frequencies of a detuning grid."""
    return np.asarray(pump_envelope(spec, grid.absolute))


def _resonance_and_band(spec, band_half_width: float) -> float:
    if band_half_width <= 0:
        raise DifferentiatorError("band half width must be positive")
    if isinstance(spec, DifferentiatorSpec):
        if band_half_width > spec.free_spectral_range / 4.0:
            raise DifferentiatorError(
                f"band half width {band_half_width} exceeds a quarter of the free "
                f"spectral range ({spec.free_spectral_range / 4.0:.4f} rad/ps)"
            )
        return spec.omega_align
    return spec.omega0


def estimate_diff_order(
    spec: Union[DifferentiatorSpec, IdealDiff], band_half_width: float
) -> float:
    """
    Magnitude order of a differentiator.

    Fits log|H| against log|ω − ω_res| on log-spaced offsets from 1e-3 of the band
    to the band edge on each side of the resonance and averages the two slopes. A
    single all-pass ring never exceeds one: it reaches first order at critical
    coupling in the narrow-band limit.

    :raise DifferentiatorError: if the band is empty or wider than FSR/4
    """
    center = _resonance_and_band(spec, band_half_width)
    offsets = np.geomspace(band_half_width * 1e-3, band_half_width, REGRESSION_POINTS)
    slopes = []
    for side in (1.0, -1.0):
        magnitude = np.abs(transfer(spec, center + side * offsets))
        slope, _ = np.polyfit(np.log(offsets), np.log(magnitude), 1)
        slopes.append(slope)
    return float(np.mean(slopes))


def phase_order(
    spec: Union[DifferentiatorSpec, IdealDiff], band_half_width: float
) -> float:
    """
    Order read from the phase jump of the transfer function, |Δ arg H| / π across the
    band ω_res ± band_half_width.

    An N-th order differentiator jumps by Nπ through its zero. A critically coupled
    ring jumps by π, an over-coupled one by up to 2π.
    """
    center = _resonance_and_band(spec, band_half_width)
    if isinstance(spec, IdealDiff):
        return float(spec.order)
    # even count keeps the exact resonance point out of the samples
    nu = np.linspace(-band_half_width, band_half_width, PHASE_POINTS)
    phase = np.unwrap(np.angle(mrr_diff_transfer(spec, center + nu)))
    return float(abs(phase[-1] - phase[0]) / math.pi)


def ring_round_trip(
    radius_um: float = DEFAULT_RING_RADIUS, group_index: float = DEFAULT_GROUP_INDEX
) -> float:
    """Round-trip delay T_s = n_g·2πR/c of a ring, in ps."""
    if radius_um <= 0 or group_index <= 0:
        raise DifferentiatorError("ring radius and group index must be positive")
    return group_index * 2.0 * math.pi * radius_um / SPEED_OF_LIGHT_UM


def tune_differentiator(
    alpha_rt: float,
    t_s: float,
    omega_align: float,
    target_order: float,
    band_half_width: float,
    tolerance: float = 1e-6,
) -> DifferentiatorSpec:
    """
    Find the over-coupled self-coupling τ_c in (0, α_rt) whose phase order matches
    ``target_order`` over the band.

    The phase order grows monotonically with τ_c on this branch, so plain bisection
    is used.

    :raise DifferentiatorError: if the target is out of reach for this ring and band
    """

    def order(tau_c: float) -> float:
        spec = DifferentiatorSpec(
            tau_c=tau_c, alpha_rt=alpha_rt, t_s=t_s, omega_align=omega_align
        )
        return phase_order(spec, band_half_width)

    # stop short of critical coupling, where the phase step is unresolvable
    lo, hi = 1e-6, alpha_rt * (1.0 - 1e-3)
    order_lo, order_hi = order(lo), order(hi)
    if not order_lo <= target_order <= order_hi:
        raise DifferentiatorError(
            f"order {target_order} unreachable: ring spans {order_lo:.3f} to "
            f"{order_hi:.3f} over ±{band_half_width:.4f} rad/ps"
        )
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if order(mid) < target_order:
            lo = mid
        else:
            hi = mid
    tau_c = 0.5 * (lo + hi)
    logger.debug("tuned differentiator: tau_c=%.6f for order %.3f", tau_c, target_order)
    return DifferentiatorSpec(
        tau_c=tau_c, alpha_rt=alpha_rt, t_s=t_s, omega_align=omega_align
    )


def default_differentiator(
    omega_align: float, band_half_width: float, order: float = DEFAULT_ORDER
) -> DifferentiatorSpec:
    """The shipped ring (30 µm radius, α = 0.993) tuned to ``order``."""
    return tune_differentiator(
        DEFAULT_ROUND_TRIP_LOSS, ring_round_trip(), omega_align, order, band_half_width
    )


class PumpWaveform:
    """Time-domain pump field with the spectrum it was synthesised from."""

    def __init__(
        self,
        time: np.ndarray,
        field: np.ndarray,
        omega: np.ndarray,
        spectrum: np.ndarray,
    ) -> None:
        self.time = time
        self.field = field
        self.omega = omega
        self.spectrum = spectrum

    @property
    def time_step(self) -> float:
        return float(self.time[1] - self.time[0])

    @property
    def omega_step(self) -> float:
        return float(self.omega[1] - self.omega[0])

    def energy(self) -> float:
        """Σ|E|²·dt."""
        return float(np.sum(np.abs(self.field) ** 2) * self.time_step)

    def spectral_energy(self) -> float:
        """Σ|A|²·dω/2π, equal to :meth:`energy` by Parseval's theorem."""
        power = np.abs(self.spectrum) ** 2
        return float(np.sum(power) * self.omega_step / (2 * math.pi))

    def data(self) -> dict:
        return {
            "time_ps": self.time,
            "field": self.field,
            "omega": self.omega,
            "spectrum": self.spectrum,
        }


def pump_waveform(spec: PumpSpec, time_grid: ArrayLike) -> PumpWaveform:
    """
    Time-domain field of the (transformed) pump, normalised to unit peak magnitude.

    The spectrum is sampled on the discrete frequencies conjugate to ``time_grid``,
    Ω_k = 2π·fftfreq(N, dt), and E(t_n) = Σ_k A(ω_c + Ω_k) e^{iΩ_k t_n} dΩ/2π.

    :raise GridError: if the time grid is not uniform
    """
    time = np.asarray(time_grid, dtype=float)
    if time.ndim != 1 or time.size < 2:
        raise GridError("a time grid needs at least two points")
    steps = np.diff(time)
    dt = float(steps.mean())
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise GridError("time grid must be uniform and increasing")

    n = time.size
    big_omega = 2.0 * math.pi * np.fft.fftfreq(n, dt)
    d_omega = 2.0 * math.pi / (n * dt)
    spectrum = np.asarray(pump_envelope(spec, spec.center + big_omega))
    field = n * np.fft.ifft(spectrum * np.exp(1j * big_omega * time[0])) * d_omega
    field /= 2.0 * math.pi

    peak = float(np.max(np.abs(field)))
    if peak == 0:
        raise GridError("time grid does not resolve the pump")
    order = np.argsort(big_omega)
    return PumpWaveform(
        time,
        field / peak,
        spec.center + big_omega[order],
        spectrum[order] / peak,
    )
