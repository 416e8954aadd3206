import numpy as np
import pytest

from dfgshaper.spectral import Spectrum, make_grid

ACCEPTANCE_LINES = []


def gaussian(grid, center, sigma, peak=1.0):
    x = (grid.wavelengths - center) / sigma
    return Spectrum(grid, peak * np.exp(-0.5 * x * x))


@pytest.fixture
def grid():
    return make_grid(1550.0, 40.0, 4001)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
