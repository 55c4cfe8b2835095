from typing import Optional, Tuple

import click
import numpy as np

from biphoton.config import Config

from ...io import (
    ADP_HEADER,
    PUMP_SPECTRUM_HEADER,
    WAVEFORM_HEADER,
    write_complex_series,
    write_grid_csv,
)
from ...jsa import compute_adp, compute_tdsi, default_sum_grid, pump_window
from ...pump import phase_order, pump_spectrum, pump_waveform
from ...units import make_grid
from ..run_config import Mode, count_adp_peaks, count_tdsi_peaks
from . import pass_config
from .utils import echo_written, make_run, set_option
from .validators import validate_fraction, validate_positive

threshold_option = click.option(
    "--threshold",
    type=float,
    default=None,
    callback=validate_fraction,
    help="Relative peak threshold.  [default: from configuration]",
)


@click.command()
@pass_config
@click.argument("config_file", metavar="CONFIG", type=click.Path(dir_okay=False))
@threshold_option
@set_option
def tdsi(
    config: Config,
    config_file: str,
    threshold: Optional[float],
    overrides: Tuple[str, ...],
):
    """Write the signal/idler filter function of CONFIG to tdsi.csv."""
    run = make_run(config, Mode.TDSI, [config_file], overrides)
    source, _ = run.source(config)
    grid = compute_tdsi(source)
    if threshold is None:
        threshold = config.get_float_option("peaks.tdsi_threshold")
    n_peaks = count_tdsi_peaks(grid, threshold)
    run.out_dir.mkdir(parents=True, exist_ok=True)
    path = run.out_dir / "tdsi.csv"
    write_grid_csv(path, *grid.wavelength_axes(), grid.values)
    echo_written([path])
    click.echo(f"peaks={n_peaks}")


@click.command()
@pass_config
@click.argument("config_file", metavar="CONFIG", type=click.Path(dir_okay=False))
@threshold_option
@set_option
def adp(
    config: Config,
    config_file: str,
    threshold: Optional[float],
    overrides: Tuple[str, ...],
):
    """Write the antidiagonal pump function of CONFIG to adp.csv."""
    run = make_run(config, Mode.ADP, [config_file], overrides)
    source, _ = run.source(config)
    sum_grid = default_sum_grid(source)
    values = compute_adp(source, sum_grid)
    if threshold is None:
        threshold = config.get_float_option("peaks.adp_threshold")
    n_peaks = count_adp_peaks(values, threshold)
    run.out_dir.mkdir(parents=True, exist_ok=True)
    path = run.out_dir / "adp.csv"
    write_complex_series(path, ADP_HEADER, sum_grid.points, values)
    echo_written([path])
    click.echo(f"peaks={n_peaks}")


@click.command()
@pass_config
@click.argument("config_file", metavar="CONFIG", type=click.Path(dir_okay=False))
@click.option(
    "--points",
    default=2048,
    show_default=True,
    callback=validate_positive,
    help="Samples of the spectrum and of the waveform.",
)
@click.option(
    "--span",
    default=20.0,
    show_default=True,
    callback=validate_positive,
    help="Half time span in units of 1/FWHM (angular).",
)
@set_option
def pump(
    config: Config,
    config_file: str,
    points: int,
    span: float,
    overrides: Tuple[str, ...],
):
    """Write the pump spectrum and time-domain field of CONFIG.

    Produces pump_spectrum.csv and pump_waveform.csv; the order of a differentiator is
    reported when one is configured.
    """
    run = make_run(config, Mode.PUMP, [config_file], overrides)
    source, _ = run.source(config)
    spec = source.pump
    grid = make_grid(spec.center, pump_window(source), points)
    spectrum = pump_spectrum(spec, grid)
    half_span = span / spec.fwhm_omega
    waveform = pump_waveform(spec, np.linspace(-half_span, half_span, points))

    run.out_dir.mkdir(parents=True, exist_ok=True)
    spectrum_path = run.out_dir / "pump_spectrum.csv"
    waveform_path = run.out_dir / "pump_waveform.csv"
    write_complex_series(spectrum_path, PUMP_SPECTRUM_HEADER, grid.points, spectrum)
    write_complex_series(waveform_path, WAVEFORM_HEADER, waveform.time, waveform.field)
    echo_written([spectrum_path, waveform_path])
    if spec.transform is not None:
        order = phase_order(spec.transform, source.pump_res.decay)
        click.echo(f"order={order:.4f}")
