import numpy as np
import pytest

from nonlocal_ist import (UniformGrid, gaussian_potential, reference_kgrid, reference_xgrid,
                          reflection_coefficients, scattering_coefficients)

# lines collected by test_acceptance.py, echoed after the run
CRITERIA_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def xgrid():
    return reference_xgrid()


@pytest.fixture(scope="session")
def kgrid():
    return reference_kgrid()


@pytest.fixture(scope="session", params=[1, -1], ids=["focusing", "defocusing"])
def sigma(request):
    return request.param


@pytest.fixture(scope="session")
def gauss(xgrid):
    return gaussian_potential(xgrid, 0.08)


@pytest.fixture(scope="session")
def shifted(xgrid):
    return gaussian_potential(xgrid, 0.08, shift=0.5)


@pytest.fixture(scope="session")
def gauss_data(gauss, kgrid):
    return scattering_coefficients(gauss, kgrid)


@pytest.fixture(scope="session")
def gauss_refl(gauss_data):
    return reflection_coefficients(gauss_data)


@pytest.fixture(scope="session")
def shifted_refl(shifted, kgrid):
    return reflection_coefficients(scattering_coefficients(shifted, kgrid))


@pytest.fixture(scope="session")
def box_grid():
    # nodes on 0 and +-1 so the jumps sit on grid points
    return UniformGrid(-2.0, 2.0, 4097)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
