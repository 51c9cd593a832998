import pytest

from rqilab.costs import chi_cost, unit_cost
from rqilab.orbits import population_grid
from rqilab.spectral import SpectralConfig, gaussian_constants

GRID = (1e2, 1e3, 1e4)


@pytest.fixture(scope="session")
def grid_populations():
    """One scan for the N grid, unit and chi_1 costs."""
    return population_grid(GRID, [unit_cost(), chi_cost(1)])


@pytest.fixture(scope="session")
def unit_constants():
    return gaussian_constants(unit_cost(), SpectralConfig())


@pytest.fixture(scope="session")
def small_cfg():
    return SpectralConfig(D=32, M_t=4000)
