"""Config module.

Reads the site and user configuration files and ``BIPHOTON_*`` environment variables
into the Config object passed to the command line tool. Numeric options provide the
defaults for grid sizes, quadrature, fitting and peak thresholds.
"""

from .config import DEFAULTS, Config, ConfigError, check_option

__all__ = ["DEFAULTS", "Config", "ConfigError", "check_option"]
