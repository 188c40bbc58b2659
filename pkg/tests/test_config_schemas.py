"""
Run configuration parsing, process settings and deterministic output files.
"""
import json
import logging

import pytest

from config import Settings, settings
from errors import ConfigError, DomainError
from logging_config import LogLevelContext
from schemas import RunConfig
from services.output_service import OutputService
from spinwave import BoundaryCondition
from units import SPECTRUM_FIT_A_EXCH


def test_default_config_is_q_band_device():
    config = RunConfig()
    design = config.to_design()
    assert config.nu == pytest.approx(34e9)
    assert len(design.positions) == 16
    assert design.positions[0] == pytest.approx(199e-9)
    assert design.positions[-1] == pytest.approx(274e-9)
    assert design.l_inter == pytest.approx(5e-9)
    assert config.material_params().a_exch == SPECTRUM_FIT_A_EXCH
    assert config.modes.bc is BoundaryCondition.DIRICHLET


def test_explicit_positions():
    config = RunConfig.from_json(json.dumps({"qubits": {"positions_nm": [210.0, 230.0, 260.0]}}))
    design = config.to_design()
    assert design.positions == pytest.approx((210e-9, 230e-9, 260e-9))
    assert design.l_inter == pytest.approx(20e-9)


def test_qubit_preset_selects_g_factor():
    config = RunConfig.from_json(json.dumps({"qubit": {"preset": "si_vacancy"}}))
    assert config.qubit_spec().g_q == pytest.approx(2.0032)
    assert config.to_design().b_qubit_free == pytest.approx(1.2127, abs=1e-4)
    assert RunConfig().qubit_spec().g_q == 2.0
    overridden = RunConfig.from_json(json.dumps({"qubit": {"preset": "si_vacancy", "g_q": 2.01}}))
    assert overridden.qubit_spec().g_q == pytest.approx(2.01)
    with pytest.raises(ConfigError):
        RunConfig.from_json(json.dumps({"qubit": {"preset": "nv_center"}}))


def test_reference_material_keeps_configured_stiffness():
    config = RunConfig.from_json(json.dumps({"material": {"preset": "dysprosium", "b_sat_T": 3.0}}))
    reference = config.reference_material_params()
    assert reference.name == "permalloy"
    assert reference.b_sat == pytest.approx(1.13)
    assert reference.a_exch == SPECTRUM_FIT_A_EXCH
    assert config.material_params().b_sat == pytest.approx(3.0)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        RunConfig.from_json(json.dumps({"geometry": {"t_x_nm": 100.0, "depth": 3}}))
    with pytest.raises(ConfigError):
        RunConfig.from_json(json.dumps({"colour": "blue"}))


@pytest.mark.parametrize("payload", [
    {"geometry": {"t_x_nm": -100.0}},
    {"geometry": {"t_x_nm": 900.0}},
    {"geometry": {"l_y_nm": 1000.0}},
    {"qubit": {"linewidth_G": 0.0}},
    {"modes": {"n_grid": 400}},
    {"qubits": {"positions_nm": [230.0, 210.0]}},
    {"spectrum": {"b_min_T": 1.5, "b_max_T": 0.7}},
    {"decoherence": {"temperatures_K": []}},
    {"material": {"preset": "iron"}},
])
def test_invalid_configs_fail_before_computation(payload):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_json(json.dumps(payload))
    assert excinfo.value.errors


def test_qubit_inside_stripe_is_a_domain_error():
    config = RunConfig.from_json(json.dumps({"qubits": {"positions_nm": [30.0, 230.0]}}))
    with pytest.raises(DomainError):
        config.to_design()


def test_from_file_missing(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / "absent.json")


def test_overrides_revalidate():
    config = RunConfig().with_overrides(preset="dysprosium", bc="neumann", output_dir="out")
    assert config.material.preset == "dysprosium"
    assert config.material_params().approximate
    assert config.modes.bc is BoundaryCondition.NEUMANN
    assert config.output_dir == "out"
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(bc="periodic")


# ============================================================================
# Settings
# ============================================================================

def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("NANOSTRIPE_SCAN_STEPS", "8000")
    monkeypatch.setenv("NANOSTRIPE_ENV", "production")
    env_settings = Settings()
    assert env_settings.scan_steps == 8000
    assert env_settings.is_production
    assert not env_settings.is_development


def test_default_preset_from_settings(monkeypatch):
    monkeypatch.setattr(settings, "default_preset", "Dysprosium")
    assert RunConfig().material.preset == "dysprosium"
    monkeypatch.setattr(settings, "default_preset", "iron")
    with pytest.raises(ConfigError):
        RunConfig.from_json("{}")


def test_settings_validation():
    errors, _ = Settings(csv_significant_digits=30, scan_steps=10).validate_run_environment()
    assert len(errors) == 2
    _, warnings = Settings(bisection_tol_T=1e-6).validate_run_environment()
    assert warnings


# ============================================================================
# Output
# ============================================================================

def test_format_value():
    assert OutputService.format_value(1.0) == "1.00000000e+00"
    assert OutputService.format_value(-0.0) == "0.00000000e+00"
    assert OutputService.format_value(-1e-30) == "-1.00000000e-30"
    assert OutputService.format_value(3) == "3"
    assert OutputService.format_value(True) == "true"
    assert OutputService.format_value(None) == ""
    assert OutputService.format_value(float("nan")) == "nan"


def test_write_csv_is_deterministic(tmp_path):
    rows = [(1, 0.1, "a"), (2, 1.0 / 3.0, "b")]
    first = OutputService.write_csv(tmp_path / "a.csv", ["i", "v", "s"], rows).read_bytes()
    second = OutputService.write_csv(tmp_path / "b.csv", ["i", "v", "s"], rows).read_bytes()
    assert first == second
    assert first.decode() == "i,v,s\n1,1.00000000e-01,a\n2,3.33333333e-01,b\n"


def test_write_csv_rejects_ragged_rows(tmp_path):
    with pytest.raises(ValueError):
        OutputService.write_csv(tmp_path / "bad.csv", ["a", "b"], [(1,)])


def test_write_json_sorted_and_rounded(tmp_path):
    path = OutputService.write_json(tmp_path / "r.json", {"b": 1.0 / 3.0, "a": [float("inf"), 2]})
    data = json.loads(path.read_text())
    assert list(data) == ["a", "b"]
    assert data["a"] == [None, 2]
    assert data["b"] == pytest.approx(0.333333333, abs=1e-12)


# ============================================================================
# Logging
# ============================================================================

def test_log_level_context_quiets_and_restores(caplog):
    spinwave_logger = logging.getLogger("spinwave")
    other = logging.getLogger("decoherence")
    spinwave_logger.setLevel(logging.INFO)
    other.setLevel(logging.DEBUG)
    caplog.set_level(logging.INFO)
    with LogLevelContext(logging.WARNING, "spinwave", "decoherence") as quiet:
        assert quiet is spinwave_logger
        spinwave_logger.info("hidden")
        other.warning("shown")
    spinwave_logger.info("visible again")
    messages = [r.getMessage() for r in caplog.records]
    assert "hidden" not in messages
    assert "shown" in messages and "visible again" in messages
    assert spinwave_logger.level == logging.INFO
    assert other.level == logging.DEBUG
    spinwave_logger.setLevel(logging.NOTSET)
    other.setLevel(logging.NOTSET)


def test_log_level_context_restores_after_error():
    target = logging.getLogger("register")
    target.setLevel(logging.INFO)
    with pytest.raises(RuntimeError):
        with LogLevelContext(logging.ERROR, "register"):
            raise RuntimeError("boom")
    assert target.level == logging.INFO
    target.setLevel(logging.NOTSET)
