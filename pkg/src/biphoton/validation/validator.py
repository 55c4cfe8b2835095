from pathlib import Path
from typing import Dict, Optional

import cerberus
import yaml

from ..io import InputError
from ..resonator import DATA_DIR

SCHEMA_PATH = Path(__file__).resolve().parent / "run_config_schema.yaml"


class LoadError(Exception):
    pass


class InvalidRunConfig(InputError):
    """A run configuration document that does not match the schema."""

    def __init__(self, errors: Dict) -> None:
        self.errors = errors
        super().__init__(f"invalid run configuration: {_format_errors(errors)}")


def _format_errors(errors: Dict, prefix: str = "") -> str:
    parts = []
    for key, messages in sorted(errors.items(), key=lambda i: str(i[0])):
        name = f"{prefix}{key}"
        for message in messages:
            if isinstance(message, dict):
                parts.append(_format_errors(message, f"{name}."))
            else:
                parts.append(f"{name}: {message}")
    return "; ".join(parts)


def builtin_names():
    return sorted(p.stem for p in DATA_DIR.glob("R*.json"))


class CustomValidator(cerberus.Validator):  # type: ignore[misc]
    def __init__(self, *args, **kwargs):
        self.base_dir = kwargs.get("base_dir")
        super().__init__(*args, **kwargs)

    def _validate_resonance(self, check_resonance, field, value):
        """The rule's arguments are validated against this schema:
        {'type': 'boolean'}"""
        if not check_resonance or not isinstance(value, str):
            return
        if value.upper() in builtin_names():
            return
        path = Path(value)
        if not path.is_absolute() and self.base_dir is not None:
            path = Path(self.base_dir) / path
        if not path.exists():
            self._error(
                field,
                f"must be one of {', '.join(builtin_names())} or an existing file",
            )

    def _validate_open_fraction(self, open_fraction, field, value):
        """The rule's arguments are validated against this schema:
        {'type': 'boolean'}"""
        if open_fraction and isinstance(value, (int, float)) and not 0 < value < 1:
            self._error(field, "must lie strictly between 0 and 1")


def _load_schema(path: Path) -> Dict:
    with path.open() as file:
        try:
            return yaml.load(file, Loader=yaml.SafeLoader)
        except yaml.YAMLError as err:
            raise LoadError(f"Failed to read validation schema {path}") from err


class RunConfigValidator:
    """Validates run configuration documents, filling in defaults."""

    _validator: CustomValidator

    def __init__(self, base_dir: Optional[Path] = None, schema_path=SCHEMA_PATH):
        try:
            self._validator = CustomValidator(
                _load_schema(Path(schema_path)), base_dir=base_dir
            )
        except cerberus.SchemaError as err:
            raise LoadError("Failed to parse validation schema") from err

    def validate(self, document: Dict) -> Dict:
        """
        :return: the normalised document
        :raise InvalidRunConfig: listing every violation
        """
        if not isinstance(document, dict):
            raise InvalidRunConfig({"document": ["must be a mapping"]})
        if not self._validator.validate(document):
            raise InvalidRunConfig(self._validator.errors)
        return self._validator.document
