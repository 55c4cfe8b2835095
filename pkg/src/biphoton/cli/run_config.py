"""Run configuration documents and pipeline assembly.

A run configuration names three resonances (built-in ``R1``…``R4``, a JSON/YAML file
relative to the document, or an inline mapping), the pump and the phase matching. Flat
``KEY=VALUE`` overrides are applied before schema validation, and every referenced file
is read before any computation starts.
"""

import copy
import enum
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field

from ..analysis import AnalysisReport, analyze, find_peaks, find_peaks_1d
from ..config import Config
from ..io import (
    ADP_HEADER,
    InputError,
    load_document,
    write_complex_series,
    write_grid_csv,
    write_intensity_csv,
    write_json,
)
from ..jsa import (
    JsaGrid,
    SourceConfig,
    compute_adp,
    compute_jsa,
    compute_tdsi,
    default_grids,
    default_sum_grid,
)
from ..phasematch import DEFAULT_LENGTH, PhaseMatchSpec
from ..pump import (
    DEFAULT_GROUP_INDEX,
    DEFAULT_ORDER,
    DEFAULT_RING_RADIUS,
    DEFAULT_ROUND_TRIP_LOSS,
    DifferentiatorSpec,
    IdealDiff,
    PumpSpec,
    ring_round_trip,
    tune_differentiator,
)
from ..resonator import SplitResonance, builtin_resonance, load_resonance, unsplit
from ..units import DetuningGrid1D, Grid2D, wavelength_to_omega
from ..validation import InvalidRunConfig, RunConfigValidator
from ..validation.validator import builtin_names

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    FIT = "fit"
    SIMULATE = "simulate"
    TDSI = "tdsi"
    ADP = "adp"
    PUMP = "pump"
    PHASEMATCH = "phasematch"
    ANALYZE = "analyze"


OVERRIDE_KEYS: Dict[str, Tuple[str, ...]] = {
    "pump.fwhm_pm": ("pump", "fwhm_pm"),
    "pump.center_nm": ("pump", "center_nm"),
    "pump.diff_order": ("pump", "differentiator", "order"),
    "grid.count": ("grid", "count"),
    "grid.half_width_linewidths": ("grid", "half_width_linewidths"),
    "quadrature.points": ("quadrature", "points"),
    "adp.oversample": ("adp", "oversample"),
    "phasematch.length_um": ("phasematch", "length_um"),
    "phasematch.tau_s": ("phasematch", "tau_s"),
    "phasematch.tau_i": ("phasematch", "tau_i"),
    "method": ("method",),
    "flat_phase": ("flat_phase",),
    "peaks.threshold": ("peaks", "threshold"),
    "pump_resonance.unsplit": ("unsplit_pump",),
}
"""Flat override keys and the document path each one sets."""


def _unknown_key(key: str) -> InputError:
    return InputError(
        f"unknown override key {key}; valid keys are {', '.join(sorted(OVERRIDE_KEYS))}"
    )


def parse_override(text: str) -> Tuple[str, Any]:
    """
    Split ``KEY=VALUE`` and convert VALUE to a number, flag or string.

    :raise InputError: on a missing ``=`` or an unknown key
    """
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep:
        raise InputError(f"override {text} must have the form KEY=VALUE")
    if key not in OVERRIDE_KEYS:
        raise _unknown_key(key)
    try:
        parsed = yaml.safe_load(value)
    except yaml.YAMLError:
        parsed = value
    return key, parsed


def apply_overrides(document: Dict, overrides: Dict[str, Any]) -> Dict:
    """Copy of ``document`` with every override written at its path."""
    document = copy.deepcopy(document)
    for key, value in overrides.items():
        if key not in OVERRIDE_KEYS:
            raise _unknown_key(key)
        *parents, leaf = OVERRIDE_KEYS[key]
        node = document
        for name in parents:
            child = node.get(name)
            if not isinstance(child, dict):
                child = {}
                node[name] = child
            node = child
        node[leaf] = value
    return document


class RunConfig(BaseModel):
    """One invocation of the command line tool."""

    model_config = ConfigDict(frozen=True)

    mode: Mode
    inputs: List[Path] = Field(default_factory=list)
    out_dir: Path = Path(".")
    overrides: Dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    threads: int = Field(default=1, ge=1)

    def check_inputs(self) -> None:
        """:raise InputError: if an input file is missing"""
        for path in self.inputs:
            if not path.exists():
                raise InputError(f"{path} does not exist")

    def load_document(self) -> Dict:
        """Read, override and validate the run configuration document."""
        self.check_inputs()
        path = self.inputs[0]
        document = load_document(path)
        if not isinstance(document, dict):
            raise InvalidRunConfig({"document": ["must be a mapping"]})
        document = apply_overrides(document, self.overrides)
        return RunConfigValidator(base_dir=path.parent).validate(document)

    def source(self, config: Config) -> Tuple[SourceConfig, Dict]:
        document = self.load_document()
        return build_source(document, self.inputs[0].parent, config), document


def _resonance(entry: Union[str, Dict], base_dir: Path) -> SplitResonance:
    if isinstance(entry, dict):
        try:
            return SplitResonance.from_data(entry)
        except ValueError as err:
            raise InputError(f"invalid inline resonance: {err}") from err
    if entry.upper() in builtin_names():
        return builtin_resonance(entry.upper())
    path = Path(entry)
    return load_resonance(path if path.is_absolute() else base_dir / path)


def _transform(options: Optional[Dict], pump: PumpSpec, pump_res: SplitResonance):
    """A ring without ``tau_c`` is tuned to ``order`` over the pump resonance, ±1/τ."""
    if options is None:
        return None
    order = options.get("order", DEFAULT_ORDER)
    if options.get("kind", "mrr") == "ideal":
        return IdealDiff(order=order, omega0=pump.center)
    alpha_rt = options.get("alpha_rt", DEFAULT_ROUND_TRIP_LOSS)
    t_s = ring_round_trip(
        options.get("radius_um", DEFAULT_RING_RADIUS),
        options.get("group_index", DEFAULT_GROUP_INDEX),
    )
    if "tau_c" in options:
        return DifferentiatorSpec(
            tau_c=options["tau_c"], alpha_rt=alpha_rt, t_s=t_s, omega_align=pump.center
        )
    return tune_differentiator(alpha_rt, t_s, pump.center, order, pump_res.decay)


def build_source(document: Dict, base_dir: Path, config: Config) -> SourceConfig:
    """
    Assemble a SourceConfig from a validated document.

    Values missing from the document come from the configuration options
    ``grid.count``, ``grid.half_width_linewidths``, ``quadrature.points`` and
    ``adp.oversample``.
    """
    pump_res = _resonance(document["pump_resonance"], base_dir)
    if document.get("unsplit_pump"):
        pump_res = unsplit(pump_res)
    signal_res = _resonance(document["signal_resonance"], base_dir)
    idler_res = _resonance(document["idler_resonance"], base_dir)

    options = document["pump"]
    center_nm = options.get("center_nm")
    center = pump_res.omega0 if center_nm is None else wavelength_to_omega(center_nm)
    pump = PumpSpec(center=center, fwhm_wavelength=options["fwhm_pm"])
    transform = _transform(options.get("differentiator"), pump, pump_res)
    if transform is not None:
        pump = PumpSpec(
            center=center, fwhm_wavelength=options["fwhm_pm"], transform=transform
        )

    pm_options = document.get("phasematch", {})
    pm = PhaseMatchSpec(
        length=pm_options.get("length_um", DEFAULT_LENGTH),
        tau_s=pm_options.get("tau_s", 0.0),
        tau_i=pm_options.get("tau_i", 0.0),
        gamma_nl=pm_options.get("gamma_nl", 0.0),
        peak_power=pm_options.get("peak_power", 0.0),
        reference_power=pm_options.get("reference_power"),
        omega_s0=signal_res.omega0,
        omega_i0=idler_res.omega0,
    )

    grid = document.get("grid", {})
    signal_grid, idler_grid = default_grids(
        signal_res,
        idler_res,
        count=grid.get("count", config.get_int_option("grid.count")),
        half_width_linewidths=grid.get(
            "half_width_linewidths",
            config.get_float_option("grid.half_width_linewidths"),
        ),
    )
    quadrature = document.get("quadrature", {})
    return SourceConfig(
        pump_res=pump_res,
        signal_res=signal_res,
        idler_res=idler_res,
        pump=pump,
        pm=pm,
        signal_grid=signal_grid,
        idler_grid=idler_grid,
        pump_quadrature_points=quadrature.get(
            "points", config.get_int_option("quadrature.points")
        ),
        adp_oversample=document.get("adp", {}).get(
            "oversample", config.get_int_option("adp.oversample")
        ),
        quadrature_half_width=quadrature.get("half_width"),
    )


class Simulation:
    """Results of one pipeline run, ready to be written out."""

    def __init__(
        self,
        source: SourceConfig,
        jsa: JsaGrid,
        tdsi: Grid2D,
        sum_grid: DetuningGrid1D,
        adp: np.ndarray,
        report: AnalysisReport,
        document: Dict,
    ) -> None:
        self.source = source
        self.jsa = jsa
        self.tdsi = tdsi
        self.sum_grid = sum_grid
        self.adp = adp
        self.report = report
        self.document = document

    def data(self) -> dict:
        data = self.report.data()
        data.update(
            {
                "label": self.document.get("label", ""),
                "method": self.jsa.method,
                "norm": self.jsa.norm,
                "window_warning": self.jsa.window_warning,
                "seed": self.document.get("seed", 0),
            }
        )
        return data

    def write(self, out_dir: Path) -> List[Path]:
        out_dir.mkdir(parents=True, exist_ok=True)
        d_lambda_s, d_lambda_i = self.jsa.grid.wavelength_axes()
        paths = {name: out_dir / name for name in OUTPUT_FILES}
        write_grid_csv(paths["jsa.csv"], d_lambda_s, d_lambda_i, self.jsa.values)
        write_intensity_csv(
            paths["jsi.csv"], d_lambda_s, d_lambda_i, self.jsa.jsi().values
        )
        write_complex_series(
            paths["adp.csv"], ADP_HEADER, self.sum_grid.points, self.adp
        )
        write_grid_csv(paths["tdsi.csv"], d_lambda_s, d_lambda_i, self.tdsi.values)
        write_json(paths["report.json"], self.data())
        return list(paths.values())


OUTPUT_FILES = ("jsa.csv", "jsi.csv", "adp.csv", "tdsi.csv", "report.json")


def simulate(
    source: SourceConfig, document: Dict, config: Config, threads: int = 1
) -> Simulation:
    """Compute the JSA, its factors and the analysis report of one source."""
    method = document.get("method", "quadrature")
    threshold = document.get("peaks", {}).get(
        "threshold", config.get_float_option("peaks.jsi_threshold")
    )
    logger.info("computing %s JSA on %s grid", method, source.signal_grid.count)
    jsa = compute_jsa(source, method=method, threads=threads)
    tdsi = compute_tdsi(source)
    sum_grid = default_sum_grid(source)
    adp = compute_adp(source, sum_grid)
    report = analyze(
        jsa,
        flat_phase=document.get("flat_phase", False),
        threshold=threshold,
        tdsi=tdsi,
        tdsi_threshold=config.get_float_option("peaks.tdsi_threshold"),
    )
    return Simulation(source, jsa, tdsi, sum_grid, adp, report, document)


def count_tdsi_peaks(tdsi: Grid2D, threshold: float) -> int:
    return len(find_peaks(np.abs(tdsi.values) ** 2, threshold))


def count_adp_peaks(adp: np.ndarray, threshold: float) -> int:
    return len(find_peaks_1d(np.abs(adp) ** 2, threshold))


def sweep(
    run: RunConfig,
    config: Config,
    parameter: str,
    values: Iterable[Any],
) -> List[Tuple[Any, float, float, int]]:
    """
    Re-run the pipeline with ``parameter`` set to each value in turn.

    :return: (value, purity, g2, number of JSI peaks) per value, in input order
    :raise InputError: if ``parameter`` is not an override key
    """
    if parameter not in OVERRIDE_KEYS:
        raise _unknown_key(parameter)
    # validate every point up front so a bad value fails before any computation
    points = []
    for value in values:
        overrides = dict(run.overrides)
        overrides[parameter] = value
        point = run.model_copy(update={"overrides": overrides})
        points.append((value, *point.source(config)))
    rows = []
    for value, source, document in points:
        logger.info("sweep point %s=%s", parameter, value)
        result = simulate(source, document, config, threads=run.threads)
        report = result.report
        rows.append(
            (
                value,
                report.schmidt.purity,
                report.g2_unheralded_zero,
                len(report.peaks),
            )
        )
    return rows
