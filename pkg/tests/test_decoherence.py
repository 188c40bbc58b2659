"""
Thermal-magnon relaxation and dephasing of the qubits.
"""
from dataclasses import replace
import math

import numpy as np
import pytest
from scipy import integrate, optimize
from hypothesis import given, strategies as st

from decoherence import (
    DecoherenceModel,
    calibrate,
    lorentzian,
    mode_coupling,
    rates,
    scale_to_material,
    sweep_temp,
    sweep_x,
    t1_rate,
    t2_rate,
    thermal_factor,
)
from errors import CalibrationError, DomainError, SingularityError
from register import qubit_line
from spinwave import highest_gap
from units import CONSTANTS, DYSPROSIUM, ueV_to_joule


@pytest.fixture(scope="module")
def model(design, lines_fine, modes_fine):
    return calibrate(design, lines_fine, modes_fine)


def test_calibration_reproduces_anchor(model, design, lines_fine, modes_fine):
    result = rates(model, design, lines_fine, modes_fine, 230e-9, 2.0)
    assert result.t1 == pytest.approx(3.4, rel=1e-9)
    assert model.gamma0 > 0


def test_t2_from_alpha_phi(model, design, lines_fine, modes_fine):
    result = rates(model, design, lines_fine, modes_fine, 230e-9, 2.0)
    assert result.t2 == pytest.approx(3.4 / (0.5 + 1.0 / 32.0), rel=1e-9)
    assert result.t2 == pytest.approx(6.4, abs=0.05)


def test_room_temperature_rates(model, design, lines_fine, modes_fine):
    hot = rates(model, design, lines_fine, modes_fine, 230e-9, 300.0)
    assert hot.t1 == pytest.approx(23.9e-3, rel=0.01)
    assert hot.t2 == pytest.approx(45e-3, rel=0.01)


def test_rate_helpers_agree(model, design, lines_fine, modes_fine):
    result = rates(model, design, lines_fine, modes_fine, 250e-9, 30.0)
    assert t1_rate(model, design, lines_fine, modes_fine, 250e-9, 30.0) == pytest.approx(result.gamma1)
    assert t2_rate(model, design, lines_fine, modes_fine, 250e-9, 30.0) == pytest.approx(result.gamma2)
    assert result.per_mode
    assert sum(c.rate for c in result.per_mode) == pytest.approx(result.gamma1)
    assert all(c.rate >= 0 for c in result.per_mode)


def test_t1_and_t2_grow_away_from_stripe(model, design, lines_fine, modes_fine):
    xs = np.arange(160e-9, 601e-9, 10e-9)
    points = sweep_x(model, design, lines_fine, modes_fine, xs, temps=(3.0,))
    assert np.all(np.diff([p.t1 for p in points]) > 0)
    assert np.all(np.diff([p.t2 for p in points]) > 0)


def test_qubit_stays_inside_spin_wave_free_window(design, lines_fine):
    gap = highest_gap(lines_fine, merge_tol=1e-4)
    for x in np.arange(160e-9, 601e-9, 10e-9):
        assert gap.lower < qubit_line(design, float(x)).b_res < gap.upper


def test_thermal_ratio_constant_across_sweep(model, design, lines_fine, modes_fine):
    xs = np.arange(160e-9, 601e-9, 40e-9)
    points = sweep_x(model, design, lines_fine, modes_fine, xs, temps=(3.0, 300.0))
    cold, hot = points[:len(xs)], points[len(xs):]
    expected = thermal_factor(design.nu, 300.0) / thermal_factor(design.nu, 3.0)
    for c, h in zip(cold, hot):
        assert c.t1 / h.t1 == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("x", [230e-9, 300e-9, 400e-9, 600e-9])
def test_far_lines_outside_window_negligible(model, design, lines_fine, modes_fine, x):
    wide = replace(model, window_T=10.0)
    near = rates(model, design, lines_fine, modes_fine, x, 3.0).gamma1
    every = rates(wide, design, lines_fine, modes_fine, x, 3.0).gamma1
    assert abs(every - near) / every < 1e-6


def test_odd_modes_do_not_couple(model, design, lines_fine, modes_fine):
    even = abs(mode_coupling(design.geom, design.mat, modes_fine[0], 230e-9))
    for mode in modes_fine:
        if mode.parity < 0:
            assert abs(mode_coupling(design.geom, design.mat, mode, 230e-9)) < 1e-10 * even
    result = rates(model, design, lines_fine, modes_fine, 230e-9, 3.0)
    odd_rate = sum(c.rate for c in result.per_mode if c.n_z % 2 == 1)
    assert odd_rate < 1e-18 * result.gamma1


def test_edge_mode_coupling_changes_sign(geom, fit_material, modes_fine):
    """The lowest mode's field at the qubit line passes through zero between 300 and 400 nm"""
    mode = modes_fine[0]
    near = mode_coupling(geom, fit_material, mode, 300e-9)
    far = mode_coupling(geom, fit_material, mode, 400e-9)
    assert near * far < 0
    root = optimize.brentq(lambda x: mode_coupling(geom, fit_material, mode, x), 300e-9, 400e-9)
    assert root == pytest.approx(332e-9, abs=10e-9)


def test_dysprosium_rates_exceed_permalloy(model, design, lines_fine, modes_fine, fit_material):
    dysprosium = fit_material.with_overrides(name="dysprosium", b_sat=DYSPROSIUM.b_sat)
    heavy = scale_to_material(model, fit_material, dysprosium)
    assert heavy.gamma0 == pytest.approx(9.0 * model.gamma0, rel=1e-12)
    light = rates(model, design, lines_fine, modes_fine, 230e-9, 2.0)
    dense = rates(heavy, design, lines_fine, modes_fine, 230e-9, 2.0)
    assert dense.gamma1 > light.gamma1
    assert dense.t1 == pytest.approx(3.4 / 9.0, rel=1e-9)


def test_scaling_to_same_material_is_identity(model, fit_material):
    assert scale_to_material(model, fit_material, fit_material) == model


def test_sweep_x_ordering(model, design, lines_fine, modes_fine):
    xs = [200e-9, 230e-9]
    points = sweep_x(model, design, lines_fine, modes_fine, xs, temps=(3.0, 300.0))
    assert [(p.temp, p.x) for p in points] == [(3.0, 200e-9), (3.0, 230e-9), (300.0, 200e-9), (300.0, 230e-9)]
    direct = rates(model, design, lines_fine, modes_fine, 230e-9, 300.0)
    assert points[-1].t1 == pytest.approx(direct.t1)


def test_t1_falls_with_temperature(model, design, lines_fine, modes_fine):
    points = sweep_temp(model, design, lines_fine, modes_fine, [2.0, 3.0, 10.0, 30.0, 100.0, 300.0])
    t1 = np.array([p.t1 for p in points])
    assert np.all(np.diff(t1) < 0)
    assert points[0].t1 / points[-1].t1 == pytest.approx(142.2, rel=0.01)


def test_calibration_errors(design, lines_fine, modes_fine):
    with pytest.raises(CalibrationError):
        calibrate(design, lines_fine, modes_fine, anchor=(230e-9, 2.0, 0.0))
    with pytest.raises(CalibrationError):
        calibrate(design, [], modes_fine)


def test_model_validation():
    with pytest.raises(DomainError):
        DecoherenceModel(gamma0=-1.0, de_fmr=1e-25, g_ref=1.0)
    with pytest.raises(DomainError):
        DecoherenceModel(gamma0=1.0, de_fmr=1e-25, g_ref=0.0)
    with pytest.raises(DomainError):
        DecoherenceModel(gamma0=1.0, de_fmr=1e-25, g_ref=1.0, alpha_phi=-0.1)


# ============================================================================
# Building blocks
# ============================================================================

def test_thermal_factor_limits():
    assert thermal_factor(34e9, 0.01) == pytest.approx(1.0)
    high_t = 2.0 * CONSTANTS.k_B * 300.0 / (CONSTANTS.h * 34e9)
    assert thermal_factor(34e9, 300.0) == pytest.approx(high_t, rel=1e-5)
    with pytest.raises(DomainError):
        thermal_factor(34e9, 0.0)


def test_lorentzian_is_unit_area():
    fwhm = ueV_to_joule(3.0)
    assert lorentzian(0.0, fwhm) == pytest.approx(2.0 / (math.pi * fwhm))
    area, _ = integrate.quad(lambda u: fwhm * lorentzian(u * fwhm, fwhm), -np.inf, np.inf)
    assert area == pytest.approx(1.0, rel=1e-8)


def test_lorentzian_zero_width():
    assert lorentzian(1e-24, 0.0) == 0.0
    with pytest.raises(SingularityError):
        lorentzian(0.0, 0.0)


@given(st.floats(min_value=50.0, max_value=1e3))
def test_lorentzian_far_wing_linear_in_width(ratio):
    fwhm = ueV_to_joule(3.0)
    detuning = ratio * fwhm
    assert lorentzian(detuning, 2.0 * fwhm) == pytest.approx(2.0 * lorentzian(detuning, fwhm), rel=1e-3)


def test_mode_coupling_scales_with_saturation(geom, fit_material, modes_fine):
    heavy = fit_material.with_overrides(b_sat=DYSPROSIUM.b_sat)
    mode = modes_fine[0]
    base = mode_coupling(geom, fit_material, mode, 230e-9)
    assert mode_coupling(geom, heavy, mode, 230e-9) == pytest.approx(3.0 * base, rel=1e-12)


def test_center_mode_coupling_decays(geom, fit_material, modes_fine):
    mode = modes_fine[4]
    xs = np.arange(160e-9, 601e-9, 20e-9)
    couplings = np.abs([mode_coupling(geom, fit_material, mode, float(x)) for x in xs])
    assert np.all(np.diff(couplings) < 0)


def test_mode_coupling_rejects_inside_points(geom, fit_material, modes_fine):
    with pytest.raises(DomainError):
        mode_coupling(geom, fit_material, modes_fine[0], 30e-9)
