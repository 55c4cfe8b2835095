"""Least-squares extraction of split-resonance parameters from transmission spectra.

The fit works on the amplitude √T of the measured power transmission and minimises

    Σ (√Tᵢ − |S_o/S_i(ωᵢ)|)²

over the eight resonance parameters. Positivity and ranges are enforced with parameter
transforms rather than bounds so both the simplex and the Levenberg-Marquardt stages
run unconstrained.
"""

import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy import optimize, signal

from .io import InputError, read_table, write_table
from .resonator import SplitResonance, through_transmission, wrap_phase
from .units import DetuningGrid1D, omega_to_wavelength, wavelength_to_omega

logger = logging.getLogger(__name__)

MIN_SAMPLES = 20

C_MAX = 1.05

SPECTRUM_HEADER = ("wavelength_nm", "transmission")

_LOG_FLOOR = 1e-12
_EXP_LIMIT = 60.0

# neutral seeds used when nothing is known about the backscattering
GAMMA_SEED = 0.4
PHI1_SEED = 0.5 * math.pi
PHI2_SEED = 1.5 * math.pi


class FitError(ValueError):
    pass


class SpectrumSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    wavelength: float = Field(gt=0)
    """Vacuum wavelength in nm."""
    transmission: float = Field(ge=0)
    """Measured power transmission ratio."""


class FitOptions(BaseModel):
    """Controls for :func:`fit_resonance`."""

    model_config = ConfigDict(frozen=True)

    starts: int = Field(default=8, ge=0)
    """Number of perturbed starts tried in addition to the unperturbed one."""
    perturbation: float = Field(default=0.30, ge=0)
    """Relative size of the log-space perturbations."""
    max_iterations: int = Field(default=500, ge=1)
    tolerance: float = Field(default=1e-10, gt=0)
    simplex_evaluations: int = Field(default=600, ge=0)
    """Function evaluations allowed to the simplex stage of each start."""
    target_rms: float = Field(default=1e-6, ge=0)
    """A start whose residual RMS reaches this level ends the search."""
    seed: int = 0


class FitResult:
    def __init__(
        self,
        params: SplitResonance,
        r_squared: float,
        residual_rms: float,
        iterations: int,
        converged: bool,
    ) -> None:
        self.params = params
        self.r_squared = r_squared
        self.residual_rms = residual_rms
        self.iterations = iterations
        self.converged = converged

    def data(self) -> dict:
        data = self.params.data()
        data["r_squared"] = self.r_squared
        data["residual_rms"] = self.residual_rms
        data["iterations"] = self.iterations
        data["converged"] = self.converged
        return data

    def __repr__(self) -> str:
        return (
            f"FitResult({self.params.label!r}, r_squared={self.r_squared:.6f}, "
            f"residual_rms={self.residual_rms:.3e}, converged={self.converged})"
        )


def r_squared(observed: np.ndarray, model: np.ndarray) -> float:
    """
    Coefficient of determination 1 − SS_res/SS_tot.

    A constant data set has no variance to explain; it scores 1 when the model
    reproduces it and 0 otherwise.
    """
    observed = np.asarray(observed, dtype=float)
    ss_res = float(np.sum((observed - model) ** 2))
    ss_tot = float(np.sum((observed - observed.mean()) ** 2))
    scale = max(float(np.sum(observed**2)), 1.0)
    if ss_tot <= 1e-24 * scale:
        return 1.0 if ss_res <= 1e-18 * scale else 0.0
    return 1.0 - ss_res / ss_tot


def _arrays(samples: Sequence[SpectrumSample]) -> Tuple[np.ndarray, np.ndarray]:
    """Angular frequencies (ascending) and amplitudes of the samples."""
    if len(samples) < MIN_SAMPLES:
        raise FitError(
            f"at least {MIN_SAMPLES} samples are needed, got {len(samples)}"
        )
    wavelengths = np.array([s.wavelength for s in samples])
    transmission = np.array([s.transmission for s in samples])
    steps = np.diff(wavelengths)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise FitError("sample wavelengths must be strictly monotone")
    omega = wavelength_to_omega(wavelengths)
    order = np.argsort(omega)
    return omega[order], np.sqrt(transmission[order])


def synthesize_spectrum(
    params: SplitResonance,
    grid: DetuningGrid1D,
    noise_sigma: float = 0.0,
    seed: Optional[int] = None,
) -> List[SpectrumSample]:
    """
    Generate a transmission spectrum from a resonance model.

    Gaussian noise of standard deviation ``noise_sigma`` is added to the amplitude and
    the noisy amplitude is clamped at zero before squaring. Samples are returned in
    ascending wavelength.
    """
    if noise_sigma < 0:
        raise FitError(f"noise sigma must be non-negative, got {noise_sigma}")
    omega = grid.absolute
    amplitude = np.abs(through_transmission(params, omega))
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        noise = rng.normal(0.0, noise_sigma, omega.size)
        amplitude = np.clip(amplitude + noise, 0, None)
    wavelengths = omega_to_wavelength(omega)
    samples = [
        SpectrumSample(wavelength=float(lam), transmission=float(a * a))
        for lam, a in zip(wavelengths, amplitude)
    ]
    samples.reverse()
    return samples


def _dip_width(amplitude: np.ndarray, index: int, level: float) -> Tuple[int, int]:
    lo = index
    while lo > 0 and amplitude[lo - 1] < level:
        lo -= 1
    hi = index
    while hi < amplitude.size - 1 and amplitude[hi + 1] < level:
        hi += 1
    return lo, hi


def _fallback_guess(omega: np.ndarray, c_norm: float) -> SplitResonance:
    span = float(omega[-1] - omega[0])
    decay = span / 8.0
    return SplitResonance(
        label="",
        C=c_norm,
        inv_tau_THz=decay,
        gamma=GAMMA_SEED,
        mu0_THz=decay / 2.0,
        kappa_sqrtTHz=math.sqrt(0.1 * decay),
        phi1_rad=PHI1_SEED,
        phi2_rad=PHI2_SEED,
        omega0_THz=float(0.5 * (omega[0] + omega[-1])),
    )


def initial_guess(samples: Sequence[SpectrumSample]) -> SplitResonance:
    """
    Heuristic starting point for :func:`fit_resonance`.

    Never fails on a valid sample list: when no dip is found a broad guess centred on
    the sampled range is returned.
    """
    omega, amplitude = _arrays(samples)
    n = omega.size
    edge = max(2, n // 10)
    outer = np.concatenate([amplitude[:edge], amplitude[-edge:]])
    c_norm = float(np.clip(np.median(outer), 1e-6, C_MAX))

    depth = c_norm - float(amplitude.min())
    if depth <= 1e-3 * c_norm:
        logger.debug("no resonance dip found, using centred fallback guess")
        return _fallback_guess(omega, c_norm)

    dips, properties = signal.find_peaks(-amplitude, prominence=0.1 * depth)
    if dips.size == 0:
        return _fallback_guess(omega, c_norm)
    ranked = dips[np.argsort(properties["prominences"])[::-1]][:2]

    level = c_norm - 0.5 * depth
    deepest = int(np.argmin(amplitude))
    lo, hi = _dip_width(amplitude, deepest, level)
    step = float(np.mean(np.diff(omega)))
    width = float(omega[hi] - omega[lo]) + step

    weights = np.clip(c_norm - amplitude[lo : hi + 1], 0, None)
    omega0 = float(np.sum(omega[lo : hi + 1] * weights) / np.sum(weights))

    if ranked.size == 2:
        mu0 = 0.5 * abs(float(omega[ranked[0]] - omega[ranked[1]]))
        decay = max(0.5 * (width - 2.0 * mu0), 2.0 * step)
    else:
        decay = max(0.5 * width, step)
        mu0 = 0.5 * decay

    # over-coupled branch of the unsplit dip: κ²τ(1 + γ²) = C + |S|min
    a_min = float(amplitude.min())
    kappa = math.sqrt((c_norm + a_min) * decay / (1.0 + GAMMA_SEED**2))

    return SplitResonance(
        label="",
        C=c_norm,
        inv_tau_THz=decay,
        gamma=GAMMA_SEED,
        mu0_THz=mu0,
        kappa_sqrtTHz=kappa,
        phi1_rad=PHI1_SEED,
        phi2_rad=PHI2_SEED,
        omega0_THz=omega0,
    )


class _Transform:
    """Maps between an unconstrained vector and resonance parameters."""

    def __init__(self, reference: SplitResonance) -> None:
        self.omega_ref = reference.omega0
        self.scale = reference.decay

    @staticmethod
    def _log(value: float) -> float:
        return math.log(max(value, _LOG_FLOOR))

    def encode(self, res: SplitResonance) -> np.ndarray:
        ratio = min(max(res.c_norm / C_MAX, 1e-9), 1.0 - 1e-9)
        return np.array(
            [
                math.log(ratio / (1.0 - ratio)),
                self._log(res.decay),
                self._log(res.gamma),
                self._log(res.mu0),
                self._log(res.kappa),
                res.phi1,
                res.phi2,
                (res.omega0 - self.omega_ref) / self.scale,
            ]
        )

    def values(self, u: np.ndarray) -> dict:
        e = np.exp(np.clip(u[1:5], -_EXP_LIMIT, _EXP_LIMIT))
        logit = float(np.clip(u[0], -_EXP_LIMIT, _EXP_LIMIT))
        return {
            "c_norm": C_MAX / (1.0 + math.exp(-logit)),
            "decay": float(e[0]),
            "gamma": float(e[1]),
            "mu0": float(e[2]),
            "kappa": float(e[3]),
            "phi1": float(u[5]),
            "phi2": float(u[6]),
            "omega0": self.omega_ref + self.scale * float(u[7]),
        }

    def trial(self, u: np.ndarray) -> SplitResonance:
        # unvalidated: evaluated hundreds of times per start
        return SplitResonance.model_construct(**self.values(u))

    def decode(self, u: np.ndarray, label: str) -> SplitResonance:
        values = self.values(u)
        values["phi1"] = wrap_phase(values["phi1"])
        values["phi2"] = wrap_phase(values["phi2"])
        values["c_norm"] = min(values["c_norm"], C_MAX)
        return SplitResonance(label=label, **values)


def _starts(
    base: np.ndarray, options: FitOptions
) -> Iterable[np.ndarray]:
    yield base
    rng = np.random.default_rng(options.seed)
    p = options.perturbation
    for _ in range(options.starts):
        u = base.copy()
        u[1:5] += np.log1p(rng.uniform(-p, p, 4))
        u[5:7] += rng.uniform(-math.pi * p, math.pi * p, 2)
        u[7] += rng.uniform(-p, p)
        yield u


def _null_candidate(
    guess: SplitResonance, omega: np.ndarray, amplitude: np.ndarray, label: str
) -> SplitResonance:
    c_norm = float(np.clip(amplitude.mean(), 1e-9, C_MAX))
    return guess.model_copy(update={"c_norm": c_norm, "kappa": 0.0, "label": label})


def fit_resonance(
    samples: Sequence[SpectrumSample],
    init: Optional[SplitResonance] = None,
    options: Optional[FitOptions] = None,
) -> FitResult:
    """
    Fit the split-resonance through-port model to a transmission spectrum.

    Each start runs a Nelder-Mead simplex followed by a Levenberg-Marquardt
    refinement; the start with the smallest residual wins, and the remaining starts
    are skipped once one fits to ``options.target_rms``. A flat no-resonance model is
    always considered as well.

    :param samples: at least 20 samples with strictly monotone wavelengths
    :param init: starting parameters, estimated with :func:`initial_guess` if omitted
    :param options: fit controls
    :return: the best fit; non-convergence is reported through ``converged``
    :raise FitError: on too few or unordered samples
    """
    options = options or FitOptions()
    omega, amplitude = _arrays(samples)
    guess = init if init is not None else initial_guess(samples)
    label = guess.label

    span = float(omega[-1] - omega[0])
    if span < 3.0 * 2.0 * guess.decay:
        logger.warning("spectrum spans fewer than 3 linewidths of the initial guess")

    transform = _Transform(guess)

    def residuals(u: np.ndarray) -> np.ndarray:
        model = np.abs(through_transmission(transform.trial(u), omega))
        return model - amplitude

    def cost(u: np.ndarray) -> float:
        r = residuals(u)
        return float(r @ r)

    best_u: Optional[np.ndarray] = None
    best_cost = math.inf
    best_status = 0
    iterations = 0
    n_params = 8

    for index, start in enumerate(_starts(transform.encode(guess), options)):
        u = start
        if options.simplex_evaluations > 0:
            simplex = optimize.minimize(
                cost,
                u,
                method="Nelder-Mead",
                options={
                    "maxfev": options.simplex_evaluations,
                    "xatol": 1e-8,
                    "fatol": 1e-16,
                },
            )
            u = simplex.x
            iterations += int(simplex.nit)
        refined = optimize.least_squares(
            residuals,
            u,
            method="lm",
            ftol=options.tolerance,
            xtol=options.tolerance,
            max_nfev=options.max_iterations * (n_params + 1),
        )
        iterations += int(refined.nfev)
        start_cost = float(refined.fun @ refined.fun)
        logger.debug(
            "fit start %d: cost %.3e status %d", index, start_cost, refined.status
        )
        if start_cost < best_cost:
            best_u, best_cost, best_status = refined.x, start_cost, refined.status
        if math.sqrt(best_cost / omega.size) <= options.target_rms:
            logger.debug("fit start %d reached the target residual", index)
            break

    params = transform.decode(best_u, label)
    converged = best_status > 0

    null = _null_candidate(guess, omega, amplitude, label)
    null_residual = np.abs(through_transmission(null, omega)) - amplitude
    if float(null_residual @ null_residual) <= best_cost:
        logger.debug("flat model fits at least as well as the resonance model")
        params, converged = null, True

    model = np.abs(through_transmission(params, omega))
    residual = model - amplitude
    rms = float(np.sqrt(np.mean(residual**2)))
    r2 = r_squared(amplitude, model)
    if not converged:
        logger.warning("resonance fit did not converge (R²=%.6f)", r2)
    return FitResult(params, r2, rms, iterations, converged)


def read_spectrum_csv(path: Union[str, Path]) -> List[SpectrumSample]:
    """
    Read a ``wavelength_nm,transmission`` CSV file.

    :raise InputError: on a missing header, an unparsable line or a negative
        transmission
    """
    table = read_table(path, SPECTRUM_HEADER)
    samples = []
    for n, (wavelength, transmission) in enumerate(
        zip(table["wavelength_nm"], table["transmission"])
    ):
        try:
            samples.append(
                SpectrumSample(wavelength=wavelength, transmission=transmission)
            )
        except ValidationError as err:
            raise InputError(f"{path}: invalid sample", line=n + 2) from err
    return samples


def write_spectrum_csv(
    samples: Sequence[SpectrumSample], path: Union[str, Path]
) -> None:
    write_table(
        path,
        SPECTRUM_HEADER,
        [[s.wavelength for s in samples], [s.transmission for s in samples]],
    )
