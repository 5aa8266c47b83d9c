"""
Shared fixtures. Solitary waves are expensive, so each one is solved once
per session and reused across modules.
"""

import math

import pytest

from bozk.base import Params
from bozk.spectral import Grid2D
from bozk.solver import SolverOptions, petviashvili_solve


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running solves and time integrations")


CANONICAL_P1 = Params(p=1, alpha=-1.0, epsilon=1, c=1.0)
CANONICAL_P2 = Params(p=2, alpha=-1.0, epsilon=1, c=1.0)
CANONICAL_P3 = Params(p=3, alpha=-1.0, epsilon=1, c=1.0)


@pytest.fixture(scope="session")
def wide_grid():
    """Box wide enough that the algebraic x-tail is below 1e-4 of the peak at the edge."""
    return Grid2D(2048, 256, 32 * math.pi, 8 * math.pi)


@pytest.fixture(scope="session")
def fine_grid():
    """dx = 3 pi/512: p >= 2 waves are narrower than p = 1 and need the x resolution."""
    return Grid2D(8192, 320, 24 * math.pi, 5 * math.pi)


@pytest.fixture(scope="session")
def small_grid():
    return Grid2D(256, 256, 4 * math.pi, 4 * math.pi)


@pytest.fixture(scope="session")
def coarse_grid():
    return Grid2D(128, 128, 4 * math.pi, 4 * math.pi)


@pytest.fixture(scope="session")
def sweep_grid():
    return Grid2D(1024, 256, 16 * math.pi, 8 * math.pi)


@pytest.fixture(scope="session")
def fine_sweep_grid():
    return Grid2D(4096, 320, 16 * math.pi, 5 * math.pi)


@pytest.fixture(scope="session")
def wave_p1(wide_grid):
    return petviashvili_solve(CANONICAL_P1, wide_grid, SolverOptions(tol=1e-10))


@pytest.fixture(scope="session")
def wave_p2(fine_grid):
    return petviashvili_solve(CANONICAL_P2, fine_grid, SolverOptions(tol=1e-10))


@pytest.fixture(scope="session")
def wave_p3(fine_grid):
    return petviashvili_solve(CANONICAL_P3, fine_grid, SolverOptions(tol=1e-10))


@pytest.fixture(scope="session")
def small_wave(small_grid):
    return petviashvili_solve(CANONICAL_P1, small_grid, SolverOptions(tol=1e-10))


@pytest.fixture(scope="session")
def coarse_wave(coarse_grid):
    return petviashvili_solve(CANONICAL_P1, coarse_grid, SolverOptions(tol=1e-10))
