import json

import pytest
from click.testing import CliRunner
from utils import config_test_file, create_run_config

from biphoton.cli.biphoton import cli
from biphoton.resonator import DATA_DIR


def invoke(*args):
    config_file = config_test_file()
    return CliRunner().invoke(cli, [f"--config-file={config_file}", *args])


def test_tdsi_command(tmp_path):
    run_file = create_run_config(tmp_path)
    result = invoke(f"--out={tmp_path}", "tdsi", str(run_file))
    assert result.exception is None
    assert "peaks=" in result.output
    lines = (tmp_path / "tdsi.csv").read_text().splitlines()
    assert lines[0] == "d_lambda_s_nm,d_lambda_i_nm,re,im,abs2"
    assert len(lines) == 17 * 17 + 1


def test_adp_command(tmp_path):
    run_file = create_run_config(tmp_path)
    result = invoke(f"--out={tmp_path}", "adp", str(run_file), "--threshold=0.5")
    assert result.exception is None
    assert "peaks=" in result.output
    lines = (tmp_path / "adp.csv").read_text().splitlines()
    assert lines[0] == "nu_sum_rad_per_ps,re,im,abs2"


def test_adp_invalid_threshold(tmp_path):
    run_file = create_run_config(tmp_path)
    result = invoke("adp", str(run_file), "--threshold=2")
    assert result.exit_code == 2


def test_pump_command(tmp_path):
    run_file = create_run_config(
        tmp_path,
        pump={"fwhm_pm": 100, "differentiator": {"kind": "ideal", "order": 1.0}},
    )
    result = invoke(f"--out={tmp_path}", "pump", str(run_file), "--points=256")
    assert result.exception is None
    assert "order=1.0000" in result.output
    spectrum = (tmp_path / "pump_spectrum.csv").read_text().splitlines()
    waveform = (tmp_path / "pump_waveform.csv").read_text().splitlines()
    assert spectrum[0] == "nu_rad_per_ps,re,im,abs2"
    assert waveform[0] == "time_ps,re,im,abs2"
    assert len(spectrum) == len(waveform) == 257


def test_phasematch_from_config(tmp_path):
    run_file = create_run_config(tmp_path, phasematch={"tau_s": 0.5, "tau_i": 0.5})
    result = invoke(f"--out={tmp_path}", "phasematch", str(run_file))
    assert result.exception is None
    assert "theta_si=-45.0000" in result.output
    assert (tmp_path / "phasematch.csv").exists()


def test_phasematch_from_dispersion(tmp_path):
    result = invoke(
        f"--out={tmp_path}",
        "phasematch",
        f"--dispersion={DATA_DIR / 'dispersion_sample.csv'}",
        "--pump-nm=1552.61",
        "--signal-nm=1546.70",
        "--idler-nm=1558.52",
        "--map-pump=1550,1554,3",
        "--map-offset=4,6,3",
    )
    assert result.exception is None
    data = json.loads((tmp_path / "phasematch.json").read_text())
    assert data["theta_si_deg"] == pytest.approx(-35.0, abs=0.01)
    assert data["tau_s"] == pytest.approx(7.0e-6, rel=1e-3)
    assert data["tau_i"] == pytest.approx(1.0e-5, rel=1e-3)
    lines = (tmp_path / "orientation_map.csv").read_text().splitlines()
    assert lines[0] == "lambda_p_nm,offset_nm,theta_deg"
    assert len(lines) == 10
    assert float(lines[1].split(",")[0]) == 1550.0


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["--dispersion={data}", "--pump-nm=1552.61"],
        ["--dispersion={data}", "--map-pump=1550,1554,3"],
        ["--dispersion={data}", "--map-pump=1550,1554", "--map-offset=4,6,3"],
    ],
)
def test_phasematch_usage_errors(args, tmp_path):
    data = DATA_DIR / "dispersion_sample.csv"
    args = [a.format(data=data) for a in args]
    result = invoke(f"--out={tmp_path}", "phasematch", *args)
    assert result.exit_code == 1
    assert "Error:" in result.output
