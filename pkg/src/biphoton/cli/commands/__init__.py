import click

from biphoton.config import Config

pass_config = click.make_pass_decorator(Config)
