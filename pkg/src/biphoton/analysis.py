"""State analysis of a joint spectral amplitude.

Schmidt decomposition and spectral purity, the purity/g⁽²⁾ relation, peak inventories of
intensity maps, marginals and loss-corrected rates.
"""

import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, ndimage

from .jsa import JsaGrid
from .units import Grid2D

logger = logging.getLogger(__name__)

REPORT_WEIGHTS = 16

DEFAULT_JSI_THRESHOLD = 0.10
DEFAULT_TDSI_THRESHOLD = 0.25
DEFAULT_ADP_THRESHOLD = 0.10

# maxima in one connected region above (1 − depth)·max form a single flat top
PLATEAU_DEPTH = 0.12

GridLike = Union[JsaGrid, Grid2D, np.ndarray]


class AnalysisError(ValueError):
    pass


def _grid_values(grid: GridLike) -> Tuple[np.ndarray, float, float]:
    """Values with the signal and idler steps (unit steps for bare arrays)."""
    if isinstance(grid, JsaGrid):
        grid = grid.grid
    if isinstance(grid, Grid2D):
        return grid.values, grid.signal_axis.step, grid.idler_axis.step
    return np.asarray(grid), 1.0, 1.0


class SchmidtResult:
    """Schmidt weights in descending order with the derived purity."""

    def __init__(self, weights: np.ndarray) -> None:
        self.weights = weights
        self.purity = min(float(np.sum(weights**2)), 1.0)

    @property
    def effective_modes(self) -> float:
        return 1.0 / self.purity

    def data(self) -> dict:
        return {
            "weights": self.weights[:REPORT_WEIGHTS],
            "purity": self.purity,
            "effective_modes": self.effective_modes,
        }

    def __repr__(self) -> str:
        return (
            f"SchmidtResult(purity={self.purity:.6f}, "
            f"weights={np.array2string(self.weights[:4], precision=4)})"
        )


def schmidt_decompose(jsa: GridLike, flat_phase: bool = False) -> SchmidtResult:
    """
    Schmidt decomposition of a sampled amplitude.

    The amplitude is weighted by √(dν_s·dν_i) so the singular values approximate the
    continuum ones; the weights are the squared singular values normalised to one.

    :param jsa: amplitude on a signal × idler grid
    :param flat_phase: decompose |F| instead of the complex F (for measured intensities,
        pass the square root of the JSI)
    :raise AnalysisError: on a degenerate, non-finite or all-zero grid
    """
    values, ds, di = _grid_values(jsa)
    if values.ndim != 2 or min(values.shape) < 2:
        raise AnalysisError(
            f"Schmidt decomposition needs a 2-D grid, got {values.shape}"
        )
    if not np.all(np.isfinite(values)):
        raise AnalysisError("amplitude grid contains non-finite values")
    matrix = np.abs(values) if flat_phase else values
    singular = np.linalg.svd(matrix * math.sqrt(ds * di), compute_uv=False)
    total = float(np.sum(singular**2))
    if total == 0:
        raise AnalysisError("amplitude grid is identically zero")
    return SchmidtResult(singular**2 / total)


def purity_to_g2(purity: float) -> float:
    """Unheralded g⁽²⁾(0) = 1 + P of one arm of a pair source."""
    if not 0 < purity <= 1:
        raise AnalysisError(f"purity must lie in (0, 1], got {purity}")
    return 1.0 + purity


def _check_threshold(rel_threshold: float) -> None:
    if not 0 < rel_threshold < 1:
        raise AnalysisError(
            f"relative peak threshold must lie in (0, 1), got {rel_threshold}"
        )


def _merge_plateaus(values: np.ndarray, candidates, structure=None) -> list:
    """
    Keep the highest of the candidates that share a connected region above
    (1 − PLATEAU_DEPTH) of the global maximum.

    ``candidates`` are (index, value) pairs sorted highest first.
    """
    labels, _ = ndimage.label(
        values >= (1.0 - PLATEAU_DEPTH) * values.max(), structure=structure
    )
    seen = set()
    kept = []
    for index, value in candidates:
        label = int(labels[index])
        if label:
            if label in seen:
                continue
            seen.add(label)
        kept.append((index, value))
    return kept


def find_peaks(grid: GridLike, rel_threshold: float = DEFAULT_JSI_THRESHOLD):
    """
    Local maxima of a real-valued map.

    A pixel is a candidate if it is interior, strictly greater than its eight
    neighbours and at least ``rel_threshold`` times the global maximum. Candidates
    joined by a ridge that stays within ``PLATEAU_DEPTH`` of the maximum form one
    flat top and count once.

    :return: list of (i, j, value), highest first
    :raise AnalysisError: on complex maps or a threshold outside (0, 1)
    """
    _check_threshold(rel_threshold)
    values, _, _ = _grid_values(grid)
    if np.iscomplexobj(values):
        raise AnalysisError("peaks are searched on real maps; pass |F|²")
    values = np.asarray(values, dtype=float)
    rows, cols = values.shape
    if rows < 3 or cols < 3:
        return []
    centre = values[1:-1, 1:-1]
    mask = np.ones(centre.shape, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= centre > values[1 + di : rows - 1 + di, 1 + dj : cols - 1 + dj]
    mask &= centre >= rel_threshold * values.max()
    candidates = sorted(
        (((int(i) + 1, int(j) + 1), float(centre[i, j])) for i, j in np.argwhere(mask)),
        key=lambda c: (-c[1], c[0]),
    )
    kept = _merge_plateaus(values, candidates, structure=np.ones((3, 3)))
    return [(i, j, value) for (i, j), value in kept]


def find_peaks_1d(
    values: Sequence[float], rel_threshold: float = DEFAULT_ADP_THRESHOLD
):
    """
    Interior local maxima of a 1-D series, merged over flat tops as in
    :func:`find_peaks`: list of (index, value), highest first.
    """
    _check_threshold(rel_threshold)
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return []
    centre = values[1:-1]
    mask = (centre > values[:-2]) & (centre > values[2:])
    mask &= centre >= rel_threshold * values.max()
    candidates = sorted(
        ((int(i) + 1, float(centre[i])) for i in np.flatnonzero(mask)),
        key=lambda c: (-c[1], c[0]),
    )
    return _merge_plateaus(values, candidates)


class LossBudget(BaseModel):
    """Single-channel loss between the chip and the detector."""

    model_config = ConfigDict(frozen=True)

    alpha_gc: float = Field(default=7.0, ge=0)
    """Grating-coupler loss per facet in dB."""
    alpha_de: float = Field(default=1.9, ge=0)
    """Loss per demultiplexing stage in dB."""
    eta_d: float = Field(default=0.9, ge=0, le=1)
    """Detector efficiency."""
    de_stages: int = Field(default=2, ge=0)

    @property
    def alpha_tot(self) -> float:
        return 1.0 - 10.0 ** ((-self.alpha_gc - self.de_stages * self.alpha_de) / 10.0)


def loss_corrected_rates(
    budget: LossBudget, raw_single: float, raw_coincidence: float
) -> Tuple[float, float]:
    """
    On-chip single and pair rates from detected ones.

    :return: (raw_single / η_d / (1 − α_tot), raw_coincidence / (η_d (1 − α_tot))²)
    :raise AnalysisError: on zero detector efficiency or negative rates
    """
    if budget.eta_d == 0:
        raise AnalysisError("detector efficiency must be positive")
    if raw_single < 0 or raw_coincidence < 0:
        raise AnalysisError("count rates must be non-negative")
    transmission = budget.eta_d * (1.0 - budget.alpha_tot)
    return raw_single / transmission, raw_coincidence / transmission**2


def marginals(grid: GridLike) -> Tuple[np.ndarray, np.ndarray]:
    """Trapezoid marginals (signal, idler) of a real map."""
    values, ds, di = _grid_values(grid)
    values = np.asarray(values, dtype=float)
    signal = integrate.trapezoid(values, dx=di, axis=1)
    idler = integrate.trapezoid(values, dx=ds, axis=0)
    return signal, idler


def marginal_fwhm(axis: Sequence[float], values: Sequence[float]) -> float:
    """
    Full width at half maximum of a sampled single-peaked curve.

    Crossings are located by linear interpolation; a curve that stays above half
    maximum up to an edge is measured to that edge.
    """
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)
    top = int(np.argmax(values))
    half = 0.5 * values[top]
    if half <= 0:
        raise AnalysisError("curve has no positive maximum")

    def crossing(indices) -> float:
        previous = top
        for k in indices:
            if values[k] < half:
                t = (values[previous] - half) / (values[previous] - values[k])
                return axis[previous] + t * (axis[k] - axis[previous])
            previous = k
        return axis[previous]

    left = crossing(range(top - 1, -1, -1))
    right = crossing(range(top + 1, axis.size))
    return float(abs(right - left))


def sum_difference_marginals(grid: Grid2D):
    """
    Marginals of a real map along ν₊ = ν_s + ν_i and ν₋ = ν_s − ν_i.

    Values are binned on the finer native step.

    :return: (sum axis, sum marginal, difference axis, difference marginal)
    """
    nu_s, nu_i = np.meshgrid(
        grid.signal_axis.points, grid.idler_axis.points, indexing="ij"
    )
    weights = np.asarray(grid.values, dtype=float) * grid.cell_area
    step = min(grid.signal_axis.step, grid.idler_axis.step)
    result = []
    for coordinate in (nu_s + nu_i, nu_s - nu_i):
        reach = float(np.max(np.abs(coordinate)))
        count = int(math.ceil(reach / step + 0.5))
        edges = (np.arange(-count, count + 2) - 0.5) * step
        hist, _ = np.histogram(coordinate, bins=edges, weights=weights)
        result.extend([0.5 * (edges[1:] + edges[:-1]), hist / step])
    return tuple(result)


class Peak(NamedTuple):
    i: int
    j: int
    d_lambda_s: float
    d_lambda_i: float
    height: float

    def data(self) -> dict:
        return {
            "d_lambda_s_nm": self.d_lambda_s,
            "d_lambda_i_nm": self.d_lambda_i,
            "height": self.height,
        }


class AnalysisReport:
    def __init__(
        self,
        schmidt: SchmidtResult,
        peaks: List[Peak],
        marginals: Tuple[np.ndarray, np.ndarray],
        tdsi_peaks: Optional[List[Peak]] = None,
    ) -> None:
        self.schmidt = schmidt
        self.g2_unheralded_zero = purity_to_g2(schmidt.purity)
        self.peaks = peaks
        self.marginals = marginals
        self.tdsi_peaks = tdsi_peaks

    def data(self) -> dict:
        data = {
            "weights": self.schmidt.weights[:REPORT_WEIGHTS],
            "purity": self.schmidt.purity,
            "g2": self.g2_unheralded_zero,
            "effective_modes": self.schmidt.effective_modes,
            "peaks": [p.data() for p in self.peaks],
        }
        if self.tdsi_peaks is not None:
            data["tdsi_peaks"] = [p.data() for p in self.tdsi_peaks]
        return data


def _located(peaks, d_lambda_s, d_lambda_i) -> List[Peak]:
    return [
        Peak(i, j, float(d_lambda_s[i]), float(d_lambda_i[j]), value)
        for i, j, value in peaks
    ]


def analyze(
    jsa: GridLike,
    flat_phase: bool = False,
    threshold: float = DEFAULT_JSI_THRESHOLD,
    tdsi: Optional[Grid2D] = None,
    axes: Optional[Tuple[np.ndarray, np.ndarray]] = None,
    tdsi_threshold: float = DEFAULT_TDSI_THRESHOLD,
) -> AnalysisReport:
    """
    Full report on an amplitude: Schmidt purity, g⁽²⁾, JSI peaks and marginals.

    :param axes: wavelength-detuning axes (nm) used to locate peaks; taken from the grid
        when it carries detuning axes, pixel indices otherwise
    :param tdsi: optional filter map whose |TDSI|² peaks are reported as well
    """
    schmidt = schmidt_decompose(jsa, flat_phase=flat_phase)
    values, _, _ = _grid_values(jsa)
    intensity = np.abs(values) ** 2
    if axes is None:
        if isinstance(jsa, (JsaGrid, Grid2D)):
            axes = (jsa.grid if isinstance(jsa, JsaGrid) else jsa).wavelength_axes()
        else:
            axes = (np.arange(values.shape[0]), np.arange(values.shape[1]))
    peaks = _located(find_peaks(intensity, threshold), *axes)
    if isinstance(jsa, JsaGrid):
        jsi = jsa.jsi()
    elif isinstance(jsa, Grid2D):
        jsi = jsa.with_values(intensity)
    else:
        jsi = intensity
    tdsi_peaks = None
    if tdsi is not None:
        tdsi_peaks = _located(
            find_peaks(np.abs(tdsi.values) ** 2, tdsi_threshold),
            *tdsi.wavelength_axes(),
        )
    logger.info("purity %.4f, %d JSI peak(s)", schmidt.purity, len(peaks))
    return AnalysisReport(schmidt, peaks, marginals(jsi), tdsi_peaks)
