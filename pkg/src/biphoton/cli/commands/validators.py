import os

import click


def validate_non_negative(ctx, param, value):
    if value is not None and value < 0:
        raise click.BadParameter("must be non-negative")
    return value


def validate_positive(ctx, param, value):
    if value is not None and value <= 0:
        raise click.BadParameter("must be greater than zero")
    return value


def validate_threads(ctx, param, value):
    if value is None:
        return None
    if value == "auto":
        return os.cpu_count() or 1
    try:
        threads = int(value)
    except ValueError:
        raise click.BadParameter("must be an integer or 'auto'") from None
    return validate_positive(ctx, param, threads)


def validate_fraction(ctx, param, value):
    if value is not None and not 0 < value < 1:
        raise click.BadParameter("must lie strictly between 0 and 1")
    return value
