"""
Stray field closed forms, homogeneity root and the finite-stripe oracle.
"""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from errors import DomainError, RootNotFoundError, SingularityError
from magnetostatics import (
    field_map,
    field_sample,
    find_x_optim,
    homogeneity_c,
    oracle_bx_3d,
    oracle_bz_3d,
    stray_bx,
    stray_bz,
    stray_bz_gradient_x,
)
from units import PERMALLOY, StripeGeometry, tesla_to_gauss

GEOM = StripeGeometry.from_nm(100.0, 800.0, 100_000.0)

outside_x = st.floats(min_value=55e-9, max_value=2e-6)
inside_z = st.floats(min_value=-390e-9, max_value=390e-9)


def test_stray_bz_at_qubit_cluster():
    """-676 G at 230 nm on the symmetry line"""
    assert tesla_to_gauss(stray_bz(GEOM, PERMALLOY, 230e-9, 0.0)) == pytest.approx(-675.8, abs=2.0)


def test_gradient_at_qubit_cluster():
    """1.44 G/nm at 230 nm"""
    grad_G_per_nm = tesla_to_gauss(stray_bz_gradient_x(GEOM, PERMALLOY, 230e-9, 0.0)) * 1e-9
    assert grad_G_per_nm == pytest.approx(1.443, abs=0.01)


def test_gradient_matches_finite_difference():
    x, dx = 300e-9, 1e-12
    numeric = (stray_bz(GEOM, PERMALLOY, x + dx, 0.0) - stray_bz(GEOM, PERMALLOY, x - dx, 0.0)) / (2 * dx)
    assert stray_bz_gradient_x(GEOM, PERMALLOY, x, 0.0) == pytest.approx(numeric, rel=1e-5)


def test_gradient_matches_finite_difference_at_random_points():
    rng = np.random.default_rng(7)
    dx = 1e-11
    for x, z in zip(rng.uniform(60e-9, 1000e-9, 20), rng.uniform(-350e-9, 350e-9, 20)):
        x, z = float(x), float(z)
        numeric = (stray_bz(GEOM, PERMALLOY, x + dx, z) - stray_bz(GEOM, PERMALLOY, x - dx, z)) / (2 * dx)
        assert stray_bz_gradient_x(GEOM, PERMALLOY, x, z) == pytest.approx(numeric, rel=1e-5, abs=1.0)


def test_bz_magnitude_falls_outside_stripe():
    xs = np.arange(51.0, 2001.0, 1.0) * 1e-9
    magnitude = np.abs(stray_bz(GEOM, PERMALLOY, xs, 0.0))
    assert np.all(np.diff(magnitude) < 0)


def test_field_inside_stripe_center():
    assert tesla_to_gauss(stray_bz(GEOM, PERMALLOY, 0.0, 0.0)) == pytest.approx(-894.6, abs=1.0)


def test_bx_vanishes_on_symmetry_line():
    assert stray_bx(GEOM, PERMALLOY, 230e-9, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_bx_points_away_from_positive_face():
    """Coulomb convention: above z = 0 and outside the stripe B_x > 0"""
    assert stray_bx(GEOM, PERMALLOY, 230e-9, 200e-9) > 0
    assert stray_bx(GEOM, PERMALLOY, -230e-9, 200e-9) < 0


def test_far_field_decays():
    assert abs(stray_bz(GEOM, PERMALLOY, 1e-3, 0.0)) < 1e-6


def test_charged_face_is_singular():
    with pytest.raises(SingularityError):
        stray_bz(GEOM, PERMALLOY, 0.0, 400e-9)
    with pytest.raises(SingularityError):
        stray_bx(GEOM, PERMALLOY, 10e-9, -400e-9)


def test_vectorized_matches_scalar():
    xs = np.array([120e-9, 230e-9, 700e-9])
    values = stray_bz(GEOM, PERMALLOY, xs, 50e-9)
    assert values.shape == (3,)
    for x, v in zip(xs, values):
        assert stray_bz(GEOM, PERMALLOY, float(x), 50e-9) == pytest.approx(v, rel=1e-14)
    assert isinstance(stray_bz(GEOM, PERMALLOY, 230e-9, 0.0), float)


def test_field_map_shape_and_empty_grid():
    xs = np.linspace(-900e-9, 900e-9, 7)
    zs = np.linspace(-500e-9, 500e-9, 5)
    bz, bx = field_map(GEOM, PERMALLOY, xs, zs)
    assert bz.shape == (5, 7) and bx.shape == (5, 7)
    sample = field_sample(GEOM, PERMALLOY, xs[1], zs[3])
    assert sample.b_z == pytest.approx(bz[3, 1])
    assert sample.b_x == pytest.approx(bx[3, 1])
    with pytest.raises(DomainError):
        field_map(GEOM, PERMALLOY, [], zs)


@given(outside_x, inside_z)
def test_symmetries(x, z):
    bz = stray_bz(GEOM, PERMALLOY, x, z)
    bx = stray_bx(GEOM, PERMALLOY, x, z)
    assert stray_bz(GEOM, PERMALLOY, -x, z) == pytest.approx(bz, rel=1e-12, abs=1e-15)
    assert stray_bz(GEOM, PERMALLOY, x, -z) == pytest.approx(bz, rel=1e-12, abs=1e-15)
    assert stray_bx(GEOM, PERMALLOY, -x, z) == pytest.approx(-bx, rel=1e-12, abs=1e-15)
    assert stray_bx(GEOM, PERMALLOY, x, -z) == pytest.approx(-bx, rel=1e-12, abs=1e-15)


@given(outside_x, inside_z, st.floats(min_value=0.1, max_value=5.0))
def test_linear_in_saturation(x, z, scale):
    scaled = PERMALLOY.with_overrides(b_sat=scale * PERMALLOY.b_sat)
    assert stray_bz(GEOM, scaled, x, z) == pytest.approx(scale * stray_bz(GEOM, PERMALLOY, x, z),
                                                         rel=1e-12, abs=1e-18)


@given(outside_x, inside_z)
def test_bz_is_negative_between_the_faces(x, z):
    assert stray_bz(GEOM, PERMALLOY, x, z) < 0


# ============================================================================
# Homogeneity
# ============================================================================

def test_x_optim_near_230_nm():
    x_opt = find_x_optim(GEOM, PERMALLOY, 100e-9)
    assert x_opt * 1e9 == pytest.approx(230.0, abs=5.0)
    assert abs(homogeneity_c(GEOM, PERMALLOY, x_opt).c_value) < 1e-12


def test_c_changes_sign_once():
    xs = np.arange(55e-9, 1000e-9, 5e-9)
    signs = np.sign([homogeneity_c(GEOM, PERMALLOY, float(x)).c_value for x in xs])
    assert np.count_nonzero(np.diff(signs)) == 1


def test_x_optim_independent_of_saturation():
    heavy = PERMALLOY.with_overrides(b_sat=3.39)
    assert find_x_optim(GEOM, heavy) == pytest.approx(find_x_optim(GEOM, PERMALLOY), abs=2e-10)


def test_homogeneity_rejects_inside_points():
    with pytest.raises(DomainError):
        homogeneity_c(GEOM, PERMALLOY, 40e-9)


def test_find_x_optim_without_sign_change():
    with pytest.raises(RootNotFoundError):
        find_x_optim(GEOM, PERMALLOY, bracket=(300e-9, 1000e-9))


# ============================================================================
# Finite-stripe oracle
# ============================================================================

def test_oracle_bz_agrees_with_closed_form():
    """50 random points, y = 0, L = 100 um: deviation below 1 %"""
    rng = np.random.default_rng(20240611)
    xs = rng.uniform(60e-9, 1000e-9, 50)
    zs = rng.uniform(-350e-9, 350e-9, 50)
    for x, z in zip(xs, zs):
        closed = stray_bz(GEOM, PERMALLOY, float(x), float(z))
        oracle = oracle_bz_3d(GEOM, PERMALLOY, float(x), 0.0, float(z))
        assert oracle == pytest.approx(closed, rel=1e-2)


@pytest.mark.parametrize("y", [-25e-6, 25e-6])
def test_oracle_bz_agrees_a_quarter_length_from_center(y):
    rng = np.random.default_rng(31)
    for x, z in zip(rng.uniform(60e-9, 1000e-9, 10), rng.uniform(-350e-9, 350e-9, 10)):
        closed = stray_bz(GEOM, PERMALLOY, float(x), float(z))
        assert oracle_bz_3d(GEOM, PERMALLOY, float(x), y, float(z)) == pytest.approx(closed, rel=1e-2)


def test_oracle_bx_agrees_with_closed_form():
    for x, z in [(150e-9, 200e-9), (230e-9, 100e-9), (500e-9, -300e-9), (-300e-9, 250e-9)]:
        closed = stray_bx(GEOM, PERMALLOY, x, z)
        oracle = oracle_bx_3d(GEOM, PERMALLOY, x, 0.0, z)
        assert oracle == pytest.approx(closed, rel=1e-2)


def test_oracle_rejects_coarse_quadrature():
    with pytest.raises(DomainError):
        oracle_bz_3d(GEOM, PERMALLOY, 230e-9, 0.0, 0.0, n_quad=16)
