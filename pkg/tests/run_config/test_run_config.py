import json

import numpy as np
import pydantic
import pytest

from biphoton.cli.run_config import (
    Mode,
    RunConfig,
    apply_overrides,
    build_source,
    count_adp_peaks,
    parse_override,
    sweep,
)
from biphoton.config import Config
from biphoton.io import InputError
from biphoton.resonator import builtin_resonance
from biphoton.validation import InvalidRunConfig


def write_document(tmp_path, **kwargs):
    document = {
        "pump_resonance": "R3",
        "signal_resonance": "R2",
        "idler_resonance": "R4",
        "pump": {"fwhm_pm": 226},
    }
    document.update(kwargs)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(document))
    return path


@pytest.mark.parametrize(
    "text, expected",
    [
        ("grid.count=9", ("grid.count", 9)),
        ("pump.fwhm_pm=102.5", ("pump.fwhm_pm", 102.5)),
        ("method=factorized", ("method", "factorized")),
        ("flat_phase=true", ("flat_phase", True)),
        (" pump.diff_order =1.7", ("pump.diff_order", 1.7)),
    ],
)
def test_parse_override(text, expected):
    assert parse_override(text) == expected


def test_parse_override_errors():
    with pytest.raises(InputError, match="KEY=VALUE"):
        parse_override("grid.count")
    with pytest.raises(InputError, match="valid keys"):
        parse_override("grid.size=3")


def test_apply_overrides_creates_nested_paths():
    document = {"pump": {"fwhm_pm": 226}}
    updated = apply_overrides(
        document, {"pump.diff_order": 1.5, "pump_resonance.unsplit": True}
    )
    assert updated["pump"] == {"fwhm_pm": 226, "differentiator": {"order": 1.5}}
    assert updated["unsplit_pump"] is True
    assert document == {"pump": {"fwhm_pm": 226}}
    with pytest.raises(InputError):
        apply_overrides(document, {"nope": 1})


def test_run_config_threads():
    with pytest.raises(pydantic.ValidationError):
        RunConfig(mode=Mode.SIMULATE, threads=0)
    assert RunConfig(mode="simulate").threads == 1


def test_missing_input(tmp_path):
    run = RunConfig(mode=Mode.SIMULATE, inputs=[tmp_path / "missing.json"])
    with pytest.raises(InputError, match="does not exist"):
        run.load_document()


def test_load_document_applies_overrides(tmp_path):
    path = write_document(tmp_path)
    run = RunConfig(
        mode=Mode.SIMULATE, inputs=[path], overrides={"grid.count": 9}
    )
    document = run.load_document()
    assert document["grid"]["count"] == 9
    assert document["method"] == "quadrature"


def test_load_document_rejects_invalid_override(tmp_path):
    path = write_document(tmp_path)
    run = RunConfig(mode=Mode.SIMULATE, inputs=[path], overrides={"method": "x"})
    with pytest.raises(InvalidRunConfig):
        run.load_document()


def test_build_source(tmp_path):
    path = write_document(tmp_path, grid={"count": 9}, unsplit_pump=True)
    run = RunConfig(mode=Mode.SIMULATE, inputs=[path])
    source, document = run.source(Config())
    assert source.signal_grid.count == 9
    assert source.idler_grid.count == 9
    assert source.pump_quadrature_points == 257
    assert source.pump_res.mu0 == 0.0
    r3 = builtin_resonance("R3")
    assert source.pump.center == pytest.approx(r3.omega0)
    assert source.pm.omega_s0 == pytest.approx(builtin_resonance("R2").omega0)
    assert source.pm.omega_i0 == pytest.approx(builtin_resonance("R4").omega0)


def test_build_source_bad_inline_resonance(tmp_path):
    document = {
        "pump_resonance": {"label": "bad"},
        "signal_resonance": "R2",
        "idler_resonance": "R4",
        "pump": {"fwhm_pm": 226},
    }
    with pytest.raises(InputError, match="inline resonance"):
        build_source(document, tmp_path, Config())


def test_sweep_unknown_parameter(tmp_path):
    run = RunConfig(mode=Mode.SIMULATE, inputs=[write_document(tmp_path)])
    with pytest.raises(InputError, match="valid keys"):
        sweep(run, Config(), "grid.size", [3, 5])


def test_sweep_validates_before_computing(tmp_path):
    run = RunConfig(mode=Mode.SIMULATE, inputs=[write_document(tmp_path)])
    with pytest.raises(InvalidRunConfig):
        sweep(run, Config(), "grid.count", [9, 1])


def test_count_adp_peaks():
    x = np.linspace(-1.0, 1.0, 201)
    adp = np.exp(-(((x - 0.5) / 0.1) ** 2)) + 0.8 * np.exp(-(((x + 0.5) / 0.1) ** 2))
    assert count_adp_peaks(adp, 0.1) == 2
    assert count_adp_peaks(adp, 0.9) == 1
