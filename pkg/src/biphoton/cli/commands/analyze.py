from typing import Optional

import click

from biphoton.config import Config

from ... import analysis
from ...io import read_grid_csv, write_json
from ..run_config import Mode
from . import pass_config
from .utils import echo_written, make_run
from .validators import validate_fraction


@click.command()
@pass_config
@click.argument("grid_csv", type=click.Path(dir_okay=False))
@click.option(
    "--flat-phase/--complex-phase",
    default=True,
    show_default=True,
    help="Decompose |F| (measured intensities) or the complex amplitude.",
)
@click.option(
    "--threshold",
    type=float,
    default=None,
    callback=validate_fraction,
    help="Relative peak threshold.  [default: from configuration]",
)
def analyze(
    config: Config, grid_csv: str, flat_phase: bool, threshold: Optional[float]
):
    """Schmidt purity, g2 and peaks of a JSA/JSI grid file.

    An intensity-only file (zero re and im columns) is read as the square root of its
    abs2 column. The report is written to report.json.
    """
    run = make_run(config, Mode.ANALYZE, [grid_csv])
    run.check_inputs()
    d_lambda_s, d_lambda_i, values = read_grid_csv(grid_csv)
    if threshold is None:
        threshold = config.get_float_option("peaks.jsi_threshold")
    report = analysis.analyze(
        values,
        flat_phase=flat_phase,
        threshold=threshold,
        axes=(d_lambda_s, d_lambda_i),
    )
    run.out_dir.mkdir(parents=True, exist_ok=True)
    path = run.out_dir / "report.json"
    write_json(path, report)
    echo_written([path])
    click.echo(
        f"purity={report.schmidt.purity:.6f} g2={report.g2_unheralded_zero:.6f} "
        f"peaks={len(report.peaks)}"
    )
