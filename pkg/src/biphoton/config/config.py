import configparser
import os
import platform
from pathlib import Path
from typing import Dict, List, Optional, TextIO, Tuple, Union, cast

import appdirs

Value = Union[int, float, bool, str]

DEFAULTS: Dict[str, Value] = {
    "grid.count": 128,
    "grid.half_width_linewidths": 6.0,
    "quadrature.points": 257,
    "adp.oversample": 4,
    "fit.starts": 8,
    "fit.max_iterations": 500,
    "fit.tolerance": 1e-10,
    "peaks.jsi_threshold": 0.10,
    "peaks.tdsi_threshold": 0.25,
    "peaks.adp_threshold": 0.10,
    "run.threads": 1,
}
"""Built-in values of the numeric options, used when no source sets them."""

ENV_PREFIX = "BIPHOTON_"


class ConfigError(Exception):
    pass


def _parse_name(arg: str) -> Tuple[str, str]:
    if "." in arg:
        section, *name, option = arg.split(".")
        if name:
            section = '{} "{}"'.format(section, ".".join(name))
    else:
        section = "DEFAULT"
        option = arg
    return section, option


def _convert(value: str) -> Value:
    if value == "":
        return value
    elif value.isdecimal():
        return int(value)
    elif value.lower() in configparser.ConfigParser.BOOLEAN_STATES:
        return configparser.ConfigParser.BOOLEAN_STATES[value.lower()]
    try:
        return float(value)
    except ValueError:
        return value


# thresholds relative to a map maximum
FRACTION_OPTIONS = ("peaks.jsi_threshold", "peaks.tdsi_threshold", "peaks.adp_threshold")
NON_NEGATIVE_OPTIONS = ("fit.starts",)


def check_option(name: str, value: str) -> Value:
    """
    Convert a textual ``value`` for option ``name``.

    Options listed in DEFAULTS must parse as the type of their built-in value and lie
    in its range; any other option is converted as it would be on reading.

    :raise ConfigError: if a built-in option gets an unusable value
    """
    converted = _convert(value)
    if name not in DEFAULTS:
        return converted
    expected = type(DEFAULTS[name])
    numeric = isinstance(converted, (int, float)) and not isinstance(converted, bool)
    if not numeric or (expected is int and not isinstance(converted, int)):
        raise ConfigError(f"Option {name} expects {expected.__name__}, got {value!r}")
    if name in FRACTION_OPTIONS:
        if not 0 < converted < 1:
            raise ConfigError(f"Option {name} must lie strictly between 0 and 1")
    elif name in NON_NEGATIVE_OPTIONS:
        if converted < 0:
            raise ConfigError(f"Option {name} must be non-negative")
    elif converted <= 0:
        raise ConfigError(f"Option {name} must be positive")
    return expected(converted)


class Config:
    class _NothingSentinel:
        pass

    NOTHING = _NothingSentinel()
    CONFIG_FILE_NAME: str = "biphoton.cfg"

    _parser: configparser.ConfigParser
    _site_config_dir: Path
    _site_config_path: Path
    _user_config_dir: Path
    _user_config_path: Path
    _debug: bool
    _verbose: bool

    def __init__(self, file_name=None) -> None:
        if file_name is None:
            file_name = Config.CONFIG_FILE_NAME
        self._parser = configparser.ConfigParser()
        self._site_config_dir = Path(appdirs.site_config_dir("biphoton"))
        self._site_config_path = self._site_config_dir / file_name
        self._user_config_dir = Path(appdirs.user_config_dir("biphoton"))
        self._user_config_path = self._user_config_dir / file_name
        self._debug = False
        self._verbose = False

    @property
    def user_config_path(self) -> Path:
        return self._user_config_path

    def _load_environmental_vars(self):
        for var in [v for v in os.environ if v.startswith(ENV_PREFIX)]:
            # BIPHOTON_GRID_HALF_WIDTH_LINEWIDTHS -> grid.half_width_linewidths
            name = var[len(ENV_PREFIX) :].lower().replace("_", ".", 1)
            self.set_option(name, os.environ[var])

    def _load_site_config(self):
        self._read(self._site_config_path)

    def _load_user_config(self):
        # Windows has no Unix-style file modes
        if (
            platform.system() != "Windows"
            and self._user_config_path.exists()
            and self._user_config_path.stat().st_mode != 0o100600
        ):
            raise ConfigError(
                f"User configuration file {self._user_config_path} has incorrect "
                "permissions (must have 0600 permissions)."
            )
        self._read(self._user_config_path)

    def _read(self, path: Path) -> None:
        try:
            self._parser.read(path)
        except configparser.Error as err:
            raise ConfigError(f"Failed to read configuration file {path}") from err

    def load(self, file: Optional[TextIO] = None) -> None:
        """
        Load the configuration.

        Environment variables are read first, then either the given file or the site
        and user config files (the user file overriding the site file). The file
        locations default to appdirs.site_config_dir('biphoton') and
        appdirs.user_config_dir('biphoton') and can be moved with the
        BIPHOTON_USER_CONFIG_PATH and BIPHOTON_SITE_CONFIG_PATH variables.

        :param file: The location of a config file to load.
        """
        self._load_environmental_vars()

        path = self.get_string_option("user.config_path", default="")
        if path:
            self._user_config_path = Path(path)
            self._user_config_dir = self._user_config_path.parent

        path = self.get_string_option("site.config_path", default="")
        if path:
            self._site_config_path = Path(path)
            self._site_config_dir = self._site_config_path.parent

        if file is not None:
            name = file.name if hasattr(file, "name") else "-"
            self._user_config_path = Path(name)
            try:
                self._parser.read_file(file)
            except configparser.Error as err:
                raise ConfigError(f"Failed to read configuration file {name}") from err
        else:
            self._load_site_config()
            self._load_user_config()

    @property
    def debug(self) -> bool:
        return self._debug

    @debug.setter
    def debug(self, debug: bool) -> None:
        self._debug = debug

    @property
    def verbose(self) -> bool:
        return self._verbose

    @verbose.setter
    def verbose(self, verbose: bool) -> None:
        self._verbose = verbose

    @property
    def config_directory(self) -> Path:
        return self._user_config_dir

    def save(self) -> None:
        """
        Save the current state of the configuration to the user configuration file.
        """
        self._user_config_dir.mkdir(parents=True, exist_ok=True)
        with self._user_config_path.open("w") as file:
            self._parser.write(file)
        self._user_config_path.chmod(0o600)

    def sections(self) -> List[str]:
        return self._parser.sections()

    def get_section(
        self, name: str, default: Optional[Dict[str, Value]] = None
    ) -> Dict[str, Value]:
        """
        Returns the section from the configuration with the given name.

        @raise KeyError if the section is not found and no default is given
        """
        try:
            items = self._parser.items(name)
            return {k: _convert(v) for (k, v) in items}
        except configparser.NoSectionError:
            if default is not None:
                return default
            raise KeyError(f"Section {name} not found in configuration") from None

    def get_option(
        self,
        name: str,
        default: Union[Value, None, _NothingSentinel] = NOTHING,
    ) -> Value:
        """
        Returns the value for the option with the given name.

        Options listed in DEFAULTS fall back to their built-in value when no default
        is given.

        @raise KeyError if the option is not found and has no default
        """
        section, option = _parse_name(name)
        try:
            return _convert(self._parser.get(section, option))
        except (configparser.NoSectionError, configparser.NoOptionError):
            if default is not Config.NOTHING:
                return cast(Value, default)
            if name in DEFAULTS:
                return DEFAULTS[name]
            raise KeyError(f"Option {name} not found in configuration") from None

    def _typed_option(self, name: str, default, types, type_name: str):
        value = self.get_option(name, default)
        if value is not None and (
            isinstance(value, bool) or not isinstance(value, types)
        ):
            raise TypeError(
                f"Invalid type of option {name}: expected {type_name}, "
                f"got {type(value)}"
            )
        return value

    def get_string_option(
        self, name: str, default: Union[str, None, _NothingSentinel] = NOTHING
    ) -> str:
        """
        As get_option but ensures the value is a string.

        @raise TypeError if the found value was not a string
        """
        value = self.get_option(name, default)
        if value is not None and not isinstance(value, str):
            raise TypeError(
                f"Invalid type of option {name}: expected str, got {type(value)}"
            )
        return value

    def get_int_option(
        self, name: str, default: Union[int, None, _NothingSentinel] = NOTHING
    ) -> int:
        """@raise TypeError if the found value was not an integer"""
        return self._typed_option(name, default, int, "int")

    def get_float_option(
        self, name: str, default: Union[float, None, _NothingSentinel] = NOTHING
    ) -> float:
        """@raise TypeError if the found value was not a number"""
        value = self._typed_option(name, default, (int, float), "float")
        return None if value is None else float(value)

    def delete_option(self, name: str) -> None:
        section, option = _parse_name(name)
        try:
            removed = self._parser.remove_option(section, option)
        except configparser.NoSectionError:
            removed = False
        if not removed:
            raise KeyError(f"Option {name} not found in configuration")

    def set_option(self, name: str, value: Value) -> None:
        section, option = _parse_name(name)
        if not self._parser.has_section(section) and section != "DEFAULT":
            self._parser.add_section(section)
        self._parser.set(section, option, str(value))

    def list_options(self) -> List[str]:
        """
        List all the options found in the configuration.

        @return: the values found as a list of "name: value" strings
        """
        options = []
        for section in self._parser.sections():
            for option in self._parser.options(section):
                value = self._parser.get(section, option)
                sec_name, *name = section.split(" ")
                if name:
                    sec_name = sec_name + "." + name[0][1:-1]
                options.append(f"{sec_name}.{option}: {value}")
        return options
