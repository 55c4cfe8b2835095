import copy
import logging
import sys
from typing import Optional, TextIO

import click

from biphoton import __version__
from biphoton.config import Config

from ..jsa import EnergyMatchingError
from ..resonator import SingularityError
from .commands.analyze import analyze
from .commands.config import config
from .commands.fit import fit, synth
from .commands.phasematch import phasematch
from .commands.simulate import simulate, sweep
from .commands.source import adp, pump, tdsi
from .commands.validators import validate_non_negative, validate_threads

g_debug = False

EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_PHYSICS_ERROR = 3

PHYSICS_ERRORS = (EnergyMatchingError, SingularityError)


def recursive_help(cmd, parent=None):
    ctx = click.core.Context(cmd, info_name=cmd.name, parent=parent)
    click.echo(cmd.get_help(ctx))
    click.echo()
    commands = getattr(cmd, "commands", {})
    for sub in commands.values():
        recursive_help(sub, ctx)


class _EchoHandler(logging.Handler):
    """Writes records to the current stderr through click."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def _setup_logging(debug: bool, verbose: bool, quiet: bool) -> None:
    logger = logging.getLogger("biphoton")
    if debug:
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    elif quiet:
        level = logging.ERROR
    else:
        level = logging.WARNING
    logger.setLevel(level)
    if not any(isinstance(h, _EchoHandler) for h in logger.handlers):
        handler = _EchoHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        logger.addHandler(handler)


class AliasCommandGroup(click.Group):
    """
    Command group with aliases that also turns library errors into exit codes:
    physics-consistency errors exit with 3, other errors with 1.
    """

    def add_command(self, cmd, name=None, aliases=None):
        super().add_command(cmd, name)
        aliases = aliases if aliases is not None else []
        for a in aliases:
            cmd = copy.copy(cmd)
            cmd.short_help = f"Alias for {name}."
            self.commands[a] = cmd

    def get_command(self, ctx, cmd_name):
        return self.commands.get(cmd_name)

    def list_commands(self, ctx):
        return sorted(self.commands)

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except PHYSICS_ERRORS as ex:
            if g_debug:
                raise
            click.echo(f"Error: {ex}", err=True)
            ctx.exit(EXIT_PHYSICS_ERROR)
        except Exception as ex:
            if g_debug:
                raise
            click.echo(f"Error: {ex}", err=True)
            ctx.exit(EXIT_INPUT_ERROR)


@click.group("biphoton", cls=AliasCommandGroup)
@click.version_option(__version__)
@click.option("-d", "--debug", is_flag=True, help="Run in debug mode.")
@click.option("-v", "--verbose", is_flag=True, help="Run with verbose output.")
@click.option("-q", "--quiet", is_flag=True, help="Only report errors.")
@click.option("-c", "--config-file", type=click.File("r"), help="Config file to load.")
@click.option(
    "-o",
    "--out",
    type=click.Path(file_okay=False),
    help="Output directory.  [default: current directory]",
)
@click.option(
    "--seed",
    type=int,
    callback=validate_non_negative,
    default=None,
    help="Random seed for synthetic data.",
)
@click.option(
    "--threads",
    callback=validate_threads,
    default=None,
    metavar="INT|auto",
    help="Worker threads for the JSA pixel loop.",
)
@click.pass_context
def cli(
    ctx,
    debug: bool,
    verbose: bool,
    quiet: bool,
    config_file: TextIO,
    out: Optional[str],
    seed: Optional[int],
    threads: Optional[int],
):
    global g_debug
    g_debug = debug
    _setup_logging(debug, verbose, quiet)
    if not ctx.obj:
        ctx.obj = Config()
        ctx.obj.load(config_file)
        ctx.obj.debug = debug
        ctx.obj.verbose = verbose
    if out is not None:
        ctx.obj.set_option("run.out", out)
    if seed is not None:
        ctx.obj.set_option("run.seed", seed)
    if threads is not None:
        ctx.obj.set_option("run.threads", threads)


@cli.command(hidden=True)
def dump_help():
    recursive_help(cli)


def add_commands():
    cli.add_command(fit)
    cli.add_command(synth)
    cli.add_command(simulate, aliases=["sim"], name="simulate")
    cli.add_command(sweep)
    cli.add_command(tdsi)
    cli.add_command(adp)
    cli.add_command(pump)
    cli.add_command(phasematch)
    cli.add_command(analyze)
    cli.add_command(config)


add_commands()


def main() -> None:
    """
    Main CLI entry function

    :return: None
    """
    try:
        cli()
    except Exception as ex:
        click.echo(f"Error: {ex}", err=True)
        if g_debug:
            raise ex
        sys.exit(EXIT_INPUT_ERROR)
