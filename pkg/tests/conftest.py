import numpy as np
import pytest

from dkpeig.linearized import pipeline
from dkpeig.spectral import ComplexField, Grid2D, PotentialSpec, sample_potential


@pytest.fixture(scope="session")
def grid():
    return Grid2D(256, 12.0)


@pytest.fixture(scope="session")
def small_grid():
    return Grid2D(64, 12.0)


@pytest.fixture(scope="session")
def gauss(grid):
    return sample_potential(PotentialSpec.gaussian(0.1, 1.0), grid)


@pytest.fixture(scope="session")
def zero(grid):
    return ComplexField.zeros(grid, "u")


@pytest.fixture(scope="session")
def gauss_k4(gauss):
    """``(hopf, beltrami, linearized)`` for the gaussian at k = 4i."""
    return pipeline(gauss, 4j)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
