"""Split-resonance model of an all-pass micro-ring.

Backscattering couples the forward and backward modes of a resonance, splitting it into
a doublet. In the frequency domain the coupled-mode equations

    da_f/dt = iω₀a_f − a_f/τ − iμ₁₂a_b − iκS_i
    da_b/dt = iω₀a_b − a_b/τ − iμ₂₁a_f − iκ'S_i

have a closed-form steady state, implemented here as the forward and backward field
enhancements l_f = a_f/S_i, l_b = a_b/S_i and the through-port ratio S_o/S_i.
"""

import logging
import math
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .io import InputError, load_document, write_json
from .units import AngularFrequency, FloatOrArray

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"

SINGULARITY_THRESHOLD = 1e-30

TWO_PI = 2.0 * math.pi


class SingularityError(ArithmeticError):
    """Raised when a resonance denominator vanishes (pathological parameter set)."""

    pass


def wrap_phase(value: float) -> float:
    """Wrap an angle into [0, 2π)."""
    wrapped = float(value) % TWO_PI
    # float modulo can round a tiny negative angle up to exactly 2π
    return 0.0 if wrapped >= TWO_PI else wrapped


class SplitResonance(BaseModel):
    """The eight fitted parameters of one resonance and its label."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    label: str = ""
    """Free text, e.g. "R3"."""
    c_norm: float = Field(alias="C", gt=0, le=1.05)
    """Amplitude normalisation C of the through-port fit."""
    decay: float = Field(alias="inv_tau_THz", gt=0)
    """Amplitude decay rate 1/τ in rad/ps."""
    gamma: float = Field(alias="gamma", ge=0)
    """Backward/forward coupling ratio γ = κ'/κ."""
    mu0: float = Field(alias="mu0_THz", ge=0)
    """Magnitude of the mutual mode coupling in rad/ps."""
    kappa: float = Field(alias="kappa_sqrtTHz", ge=0)
    """Forward field coupling coefficient in sqrt(rad/ps)."""
    phi1: float = Field(alias="phi1_rad")
    """Phase of μ₁₂."""
    phi2: float = Field(alias="phi2_rad")
    """Phase of μ₂₁."""
    omega0: AngularFrequency = Field(alias="omega0_THz")
    """Resonant angular frequency in rad/ps."""

    @field_validator("phi1", "phi2")
    @classmethod
    def _wrap(cls, value: float) -> float:
        return wrap_phase(value)

    @property
    def mu12(self) -> complex:
        return self.mu0 * complex(math.cos(self.phi1), math.sin(self.phi1))

    @property
    def mu21(self) -> complex:
        return self.mu0 * complex(math.cos(self.phi2), math.sin(self.phi2))

    @property
    def kappa_back(self) -> float:
        """Backward coupling κ' = γκ."""
        return self.gamma * self.kappa

    @property
    def tau(self) -> float:
        return 1.0 / self.decay

    def data(self) -> dict:
        return self.model_dump(by_alias=True)

    @classmethod
    def from_data(cls, data: dict) -> "SplitResonance":
        return cls.model_validate(data)


def linewidth(res: SplitResonance) -> float:
    """Power full width at half maximum 2/τ of the unsplit resonance, rad/ps."""
    return 2.0 * res.decay


def unsplit(res: SplitResonance) -> SplitResonance:
    """Copy of the resonance with backscattering removed (μ₀ = 0, γ = 0)."""
    return res.model_copy(update={"mu0": 0.0, "gamma": 0.0})


def _detuned(res: SplitResonance, omega: ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    delta = np.asarray(omega, dtype=float) - res.omega0
    g = 1j * delta + res.decay
    denominator = g * g + res.mu12 * res.mu21
    if np.any(np.abs(denominator) < SINGULARITY_THRESHOLD):
        raise SingularityError(
            f"resonance {res.label or '?'} denominator vanishes; check parameters"
        )
    return delta, denominator


def _scalar(value: np.ndarray) -> Union[complex, np.ndarray]:
    return complex(value) if np.ndim(value) == 0 else value


def enhancement_forward(res: SplitResonance, omega: ArrayLike):
    """
    Forward field enhancement l_f(ω) = a_f/S_i.

    :param res: the resonance
    :param omega: absolute angular frequency (scalar or array) in rad/ps
    :return: complex enhancement in 1/sqrt(rad/ps)
    :raise SingularityError: if the denominator magnitude drops below 1e-30
    """
    delta, denominator = _detuned(res, omega)
    numerator = -res.gamma * res.mu12 + delta - 1j * res.decay
    return _scalar(res.kappa * numerator / denominator)


def enhancement_backward(res: SplitResonance, omega: ArrayLike):
    """
    Backward field enhancement l_b(ω) = a_b/S_i.

    Vanishes identically without backscattering (μ₀ = 0, γ = 0).
    """
    delta, denominator = _detuned(res, omega)
    numerator = -res.mu21 + res.gamma * delta - 1j * res.gamma * res.decay
    return _scalar(res.kappa * numerator / denominator)


def through_transmission(res: SplitResonance, omega: ArrayLike):
    """
    Through-port field ratio S_o/S_i.

    C takes the place of the unit leading term, so C = 1 reproduces the coupled-mode
    output exactly and κ = 0 gives a flat response equal to C.
    """
    delta, denominator = _detuned(res, omega)
    phases = complex(math.cos(res.phi1), math.sin(res.phi1)) + complex(
        math.cos(res.phi2), math.sin(res.phi2)
    )
    g = 1j * delta + res.decay
    numerator = 1j * res.gamma * res.mu0 * phases - (1.0 + res.gamma**2) * g
    return _scalar(res.c_norm + res.kappa**2 * numerator / denominator)


def solve_tcmt_steady(
    res: SplitResonance, omega: ArrayLike, s_in: complex
) -> Tuple[FloatOrArray, FloatOrArray, FloatOrArray]:
    """
    Steady-state solution of the coupled-mode equations for a drive ``s_in``.

    :return: (a_f, a_b, s_out) with s_out = s_in − iκa_f − iκ'a_b
    """
    a_f = enhancement_forward(res, omega) * s_in
    a_b = enhancement_backward(res, omega) * s_in
    s_out = s_in - 1j * res.kappa * a_f - 1j * res.kappa_back * a_b
    return a_f, a_b, s_out


def load_resonance(path: Union[str, Path]) -> SplitResonance:
    """
    Read a resonance JSON document.

    :raise InputError: if the file is missing or does not parse
    :raise pydantic.ValidationError: if the parameters violate the model constraints
    """
    data = load_document(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected a resonance mapping")
    return SplitResonance.from_data(data)


def dump_resonance(res: SplitResonance, path: Union[str, Path]) -> None:
    write_json(path, res.data())


def builtin_resonance(name: str) -> SplitResonance:
    """
    Return one of the shipped resonances ("R1" to "R4").

    :raise KeyError: if no resonance of that name is shipped
    """
    path = DATA_DIR / f"{name.upper()}.json"
    if not path.exists():
        raise KeyError(f"unknown builtin resonance {name}")
    return load_resonance(path)
