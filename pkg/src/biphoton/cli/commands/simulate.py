from pathlib import Path
from typing import List, Optional, Tuple

import click

from biphoton.config import Config

from ...io import InputError, write_sweep_csv
from .. import run_config
from ..run_config import Mode
from . import pass_config
from .utils import echo_written, make_run, set_option


@click.command()
@pass_config
@click.argument("config_file", metavar="CONFIG", type=click.Path(dir_okay=False))
@set_option
def simulate(config: Config, config_file: str, overrides: Tuple[str, ...]):
    """Simulate the photon-pair source described by CONFIG (JSON or YAML).

    Writes jsa.csv, jsi.csv, adp.csv, tdsi.csv and report.json to the output directory.
    """
    run = make_run(config, Mode.SIMULATE, [config_file], overrides)
    source, document = run.source(config)
    result = run_config.simulate(source, document, config, threads=run.threads)
    echo_written(result.write(run.out_dir))
    report = result.report
    click.echo(
        f"purity={report.schmidt.purity:.6f} g2={report.g2_unheralded_zero:.6f} "
        f"peaks={len(report.peaks)}"
    )


def _parse_values(values: str) -> List:
    items = [v.strip() for v in values.split(",") if v.strip()]
    if not items:
        raise InputError("no sweep values given")
    parsed = []
    for item in items:
        try:
            parsed.append(int(item))
        except ValueError:
            try:
                parsed.append(float(item))
            except ValueError:
                raise InputError(f"sweep value {item} is not a number") from None
    return parsed


@click.command()
@pass_config
@click.argument("config_file", metavar="CONFIG", type=click.Path(dir_okay=False))
@click.argument("parameter")
@click.argument("values")
@click.option(
    "--out-csv",
    type=click.Path(dir_okay=False),
    help="Result file.  [default: <out>/sweep.csv]",
)
@set_option
def sweep(
    config: Config,
    config_file: str,
    parameter: str,
    values: str,
    out_csv: Optional[str],
    overrides: Tuple[str, ...],
):
    """Re-run CONFIG with PARAMETER set to each of the comma separated VALUES.

    Writes one value,purity,g2,n_peaks row per value.
    """
    run = make_run(config, Mode.SIMULATE, [config_file], overrides)
    rows = run_config.sweep(run, config, parameter, _parse_values(values))
    path = Path(out_csv) if out_csv else run.out_dir / "sweep.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(path, rows)
    for value, purity, g2, n_peaks in rows:
        click.echo(
            f"{parameter}={value} purity={purity:.6f} g2={g2:.6f} peaks={n_peaks}"
        )
