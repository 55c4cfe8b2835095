from typing import Optional, Tuple

import click
import numpy as np

from biphoton.config import Config

from ...io import (
    ORIENTATION_HEADER,
    InputError,
    write_grid_csv,
    write_json,
    write_table,
)
from ...phasematch import (
    group_velocity_mismatch,
    load_dispersion,
    orientation_angle,
    orientation_map,
    phase_matching_grid,
    ridge_angle,
)
from ..run_config import Mode
from . import pass_config
from .utils import echo_written, make_run, set_option


def _linspace(text: Optional[str]) -> Optional[np.ndarray]:
    if text is None:
        return None
    try:
        start, stop, count = text.split(",")
        return np.linspace(float(start), float(stop), int(count))
    except ValueError:
        raise InputError(f"range {text} must be START,STOP,COUNT") from None


@click.command()
@pass_config
@click.argument(
    "config_file", metavar="[CONFIG]", required=False, type=click.Path(dir_okay=False)
)
@click.option(
    "--dispersion",
    type=click.Path(exists=True, dir_okay=False),
    help="lambda_nm,k1_ps_per_um table of first-order dispersion.",
)
@click.option("--pump-nm", type=float, help="Pump wavelength.")
@click.option("--signal-nm", type=float, help="Signal wavelength.")
@click.option("--idler-nm", type=float, help="Idler wavelength.")
@click.option(
    "--map-pump", metavar="START,STOP,N", help="Pump wavelengths of an angle map (nm)."
)
@click.option(
    "--map-offset", metavar="START,STOP,N", help="Idler offsets of an angle map (nm)."
)
@set_option
def phasematch(
    config: Config,
    config_file: Optional[str],
    dispersion: Optional[str],
    pump_nm: Optional[float],
    signal_nm: Optional[float],
    idler_nm: Optional[float],
    map_pump: Optional[str],
    map_offset: Optional[str],
    overrides: Tuple[str, ...],
):
    """Phase matching of CONFIG, or orientation angles from a dispersion table.

    With CONFIG the phase-matching function is written to phasematch.csv. With
    --dispersion and three wavelengths the group-velocity mismatches and the ridge
    angle are reported; with --map-pump and --map-offset an angle map is written to
    orientation_map.csv.
    """
    if config_file is None and dispersion is None:
        raise InputError("give a run configuration or a --dispersion table")
    inputs = [config_file] if config_file else []
    run = make_run(config, Mode.PHASEMATCH, inputs, overrides)
    written = []
    results = {}
    if config_file is not None:
        source, _ = run.source(config)
        grid = phase_matching_grid(source.pm, source.signal_grid, source.idler_grid)
        path = run.out_dir / "phasematch.csv"
        run.out_dir.mkdir(parents=True, exist_ok=True)
        write_grid_csv(path, *grid.wavelength_axes(), grid.values)
        written.append(path)
        click.echo(f"theta_si={orientation_angle(source.pm):.4f}")
    if dispersion is not None:
        table = load_dispersion(dispersion)
        wavelengths = (pump_nm, signal_nm, idler_nm)
        if any(w is not None for w in wavelengths):
            if any(w is None for w in wavelengths):
                raise InputError("--pump-nm, --signal-nm and --idler-nm go together")
            tau_s, tau_i = group_velocity_mismatch(table, *wavelengths)
            theta = ridge_angle(tau_s, tau_i)
            results = {"tau_s": tau_s, "tau_i": tau_i, "theta_si_deg": theta}
            click.echo(f"tau_s={tau_s:.6e} tau_i={tau_i:.6e} theta_si={theta:.4f}")
        pumps, offsets = _linspace(map_pump), _linspace(map_offset)
        if (pumps is None) != (offsets is None):
            raise InputError("--map-pump and --map-offset go together")
        if pumps is not None:
            angles = orientation_map(table, pumps, offsets)
            p, o = np.meshgrid(pumps, offsets, indexing="ij")
            path = run.out_dir / "orientation_map.csv"
            run.out_dir.mkdir(parents=True, exist_ok=True)
            write_table(path, ORIENTATION_HEADER, [p, o, angles])
            written.append(path)
    if results:
        run.out_dir.mkdir(parents=True, exist_ok=True)
        path = run.out_dir / "phasematch.json"
        write_json(path, results)
        written.append(path)
    echo_written(written)
