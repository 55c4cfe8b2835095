from pathlib import Path
from typing import Optional

import click

from biphoton.config import Config

from ...io import write_json
from ...resonator import linewidth, load_resonance
from ...specfit import (
    FitOptions,
    fit_resonance,
    read_spectrum_csv,
    synthesize_spectrum,
    write_spectrum_csv,
)
from ...units import make_grid
from ..run_config import Mode
from . import pass_config
from .utils import make_run
from .validators import validate_non_negative, validate_positive

EXIT_NOT_CONVERGED = 2


@click.command()
@pass_config
@click.argument("spectrum", type=click.Path(dir_okay=False))
@click.option(
    "--out-json",
    type=click.Path(dir_okay=False),
    help="Result file.  [default: <out>/<SPECTRUM stem>.fit.json]",
)
@click.option("--label", help="Resonance label.  [default: SPECTRUM stem]")
@click.pass_context
def fit(
    ctx, config: Config, spectrum: str, out_json: Optional[str], label: Optional[str]
):
    """Fit the split-resonance model to the transmission SPECTRUM (CSV).

    Exits with status 2 if the fit did not converge.
    """
    run = make_run(config, Mode.FIT, [spectrum])
    run.check_inputs()
    samples = read_spectrum_csv(spectrum)
    options = FitOptions(
        starts=config.get_int_option("fit.starts"),
        max_iterations=config.get_int_option("fit.max_iterations"),
        tolerance=config.get_float_option("fit.tolerance"),
        seed=run.seed,
    )
    result = fit_resonance(samples, options=options)
    label = label or Path(spectrum).stem
    result.params = result.params.model_copy(update={"label": label})

    stem = Path(spectrum).stem
    path = Path(out_json) if out_json else run.out_dir / f"{stem}.fit.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_json(path, result)
    click.echo(f"{label} R2={result.r_squared:.6f}")
    if not result.converged:
        ctx.exit(EXIT_NOT_CONVERGED)


@click.command()
@pass_config
@click.argument("resonance", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_csv", type=click.Path(dir_okay=False))
@click.option(
    "--points",
    default=400,
    show_default=True,
    callback=validate_positive,
    help="Number of samples.",
)
@click.option(
    "--linewidths",
    default=8.0,
    show_default=True,
    callback=validate_positive,
    help="Half span of the spectrum in linewidths.",
)
@click.option(
    "--noise",
    default=0.0,
    show_default=True,
    callback=validate_non_negative,
    help="Standard deviation of the amplitude noise.",
)
def synth(
    config: Config,
    resonance: str,
    out_csv: str,
    points: int,
    linewidths: float,
    noise: float,
):
    """Write a synthetic transmission spectrum of the RESONANCE (JSON) to OUT_CSV."""
    params = load_resonance(resonance)
    grid = make_grid(params.omega0, linewidths * linewidth(params), points)
    seed = config.get_int_option("run.seed", default=0)
    samples = synthesize_spectrum(params, grid, noise_sigma=noise, seed=seed)
    Path(out_csv).parent.mkdir(parents=True, exist_ok=True)
    write_spectrum_csv(samples, out_csv)
    click.echo(f"wrote {out_csv}")
