import click

from ...config import DEFAULTS, ConfigError, check_option
from . import pass_config


@click.group()
def config():
    """Query/update the numeric defaults of grids, fits and peak searches."""
    pass


@config.command()
@pass_config
@click.argument("option")
def get(config, option):
    """Get the OPTION, falling back to its built-in value."""
    click.echo(config.get_option(option))


@config.command()
@pass_config
@click.argument("option")
@click.argument("value")
def set(config, option, value):
    """Set the OPTION to the given VALUE.

    Built-in options are checked against the type and range of their default before
    the configuration file is written.
    """
    try:
        converted = check_option(option, value)
    except ConfigError as err:
        raise click.BadParameter(str(err), param_hint="VALUE") from err
    config.set_option(option, converted)
    config.save()


@config.command()
@pass_config
@click.argument("option")
def delete(config, option):
    """Delete the OPTION; built-in options return to their default."""
    config.delete_option(option)
    config.save()
    click.echo("Success.")


@config.command()
@pass_config
@click.option(
    "--defaults", is_flag=True, help="Also list built-in options left at their value."
)
def list(config, defaults):
    """List all configurations OPTIONS set."""
    options = config.list_options()
    for line in options:
        click.echo(line)
    if defaults:
        set_names = {line.split(":", 1)[0] for line in options}
        for name, value in DEFAULTS.items():
            if name not in set_names:
                click.echo(f"{name}: {value} (default)")


@config.command()
@pass_config
def path(config):
    """Print the location of the user configuration file."""
    click.echo(config.user_config_path)
