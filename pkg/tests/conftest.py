"""
Shared fixtures for the nanostripe test suite.

Mode solves are the expensive part; they are computed once per session and shared.
"""
import os
import sys

import pytest

# Add the repository root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from register import RegisterDesign
from spinwave import assemble_lines, build_potential, tm_eigensolve
from units import PERMALLOY, SPECTRUM_FIT_A_EXCH, QubitSpec, StripeGeometry, get_material

Q_BAND_HZ = 34e9


@pytest.fixture(scope="session")
def geom():
    """100 nm x 800 nm x 100 um stripe"""
    return StripeGeometry.from_nm(100.0, 800.0, 100_000.0)


@pytest.fixture(scope="session")
def permalloy():
    return PERMALLOY


@pytest.fixture(scope="session")
def fit_material():
    """Permalloy with the exchange stiffness used for the field-sweep spectrum"""
    return get_material("permalloy", a_exch=SPECTRUM_FIT_A_EXCH)


@pytest.fixture(scope="session")
def design(geom, fit_material):
    """16 qubits from 199 nm at 5 nm pitch, driven at 34 GHz"""
    return RegisterDesign.from_array(geom, fit_material, QubitSpec(), Q_BAND_HZ,
                                     x_start=199e-9, pitch=5e-9, count=16)


@pytest.fixture(scope="session")
def potential_coarse(geom, fit_material):
    return build_potential(geom, fit_material, 0.0, 801)


@pytest.fixture(scope="session")
def modes_coarse(potential_coarse):
    return tm_eigensolve(potential_coarse, 10)


@pytest.fixture(scope="session")
def potential_fine(geom, fit_material):
    return build_potential(geom, fit_material, 0.0, 3201)


@pytest.fixture(scope="session")
def modes_fine(potential_fine):
    return tm_eigensolve(potential_fine, 10)


@pytest.fixture(scope="session")
def lines_fine(modes_fine, geom, fit_material):
    return assemble_lines(modes_fine, geom, fit_material, Q_BAND_HZ, 2)
