import json
from pathlib import Path


def config_test_file() -> Path:
    config = """\
[grid]
count = 17

[quadrature]
points = 129

[fit]
starts = 1
"""
    config_file = Path(__file__).parent / "test.cfg"
    config_file.write_text(config)
    return config_file


def create_run_config(directory: Path, **kwargs) -> Path:
    document = {
        "label": "test",
        "pump_resonance": "R3",
        "signal_resonance": "R2",
        "idler_resonance": "R4",
        "pump": {"fwhm_pm": 226},
    }
    document.update(kwargs)
    path = directory / "run.json"
    path.write_text(json.dumps(document))
    return path


def get_file_path(file_name) -> Path:
    return Path(__file__).parent / file_name
