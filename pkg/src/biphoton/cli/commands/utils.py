from pathlib import Path
from typing import Dict, Iterable, Sequence

import click

from biphoton.config import Config

from ..run_config import Mode, RunConfig, parse_override


def output_dir(config: Config) -> Path:
    return Path(str(config.get_option("run.out", default=".")))


def make_run(
    config: Config,
    mode: Mode,
    inputs: Sequence[str] = (),
    overrides: Iterable[str] = (),
) -> RunConfig:
    """Collect the global run options and the ``--set`` overrides of a command."""
    parsed: Dict = dict(parse_override(o) for o in overrides)
    return RunConfig(
        mode=mode,
        inputs=[Path(p) for p in inputs],
        out_dir=output_dir(config),
        overrides=parsed,
        seed=config.get_int_option("run.seed", default=0),
        threads=config.get_int_option("run.threads"),
    )


def set_option(func):
    return click.option(
        "--set",
        "overrides",
        multiple=True,
        metavar="KEY=VALUE",
        help="Override a run configuration value (repeatable).",
    )(func)


def echo_written(paths: Iterable[Path]) -> None:
    for path in paths:
        click.echo(f"wrote {path}")
