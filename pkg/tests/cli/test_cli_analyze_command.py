import json

import numpy as np
import pytest
from click.testing import CliRunner
from utils import config_test_file

from biphoton.cli.biphoton import cli
from biphoton.io import write_grid_csv, write_intensity_csv


def axes():
    return np.linspace(0.2, -0.2, 21), np.linspace(0.2, -0.2, 21)


def test_analyze_intensity_file(tmp_path):
    ls, li = axes()
    intensity = np.outer(np.exp(-(ls**2) / 0.01), np.exp(-(li**2) / 0.01))
    grid_file = tmp_path / "jsi.csv"
    write_intensity_csv(grid_file, ls, li, intensity)
    config_file = config_test_file()
    result = CliRunner().invoke(
        cli,
        [
            f"--config-file={config_file}",
            f"--out={tmp_path}",
            "analyze",
            str(grid_file),
        ],
    )
    assert result.exception is None
    assert "peaks=1" in result.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["purity"] == pytest.approx(1.0, abs=1e-9)
    peak = report["peaks"][0]
    assert peak["d_lambda_s_nm"] == pytest.approx(0.0, abs=1e-12)
    assert peak["d_lambda_i_nm"] == pytest.approx(0.0, abs=1e-12)


def test_analyze_complex_phase(tmp_path):
    ls, li = axes()
    values = np.eye(21) * np.exp(1j * np.arange(21))[:, None]
    grid_file = tmp_path / "jsa.csv"
    write_grid_csv(grid_file, ls, li, values)
    config_file = config_test_file()
    result = CliRunner().invoke(
        cli,
        [
            f"--config-file={config_file}",
            f"--out={tmp_path}",
            "analyze",
            str(grid_file),
            "--complex-phase",
        ],
    )
    assert result.exception is None
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["purity"] == pytest.approx(1 / 21)
    assert len(report["weights"]) == 16


def test_analyze_missing_file(tmp_path):
    config_file = config_test_file()
    result = CliRunner().invoke(
        cli, [f"--config-file={config_file}", "analyze", str(tmp_path / "none.csv")]
    )
    assert result.exit_code == 1
    assert "does not exist" in result.output
