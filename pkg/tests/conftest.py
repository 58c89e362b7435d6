import numpy as np
import pytest

from feeplan.core import validate_matrix

ACCEPTANCE_LINES = []


def random_matrix(rng, n, low=0, high=9, density=1.0):
    grid = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                grid[i, j] = grid[j, i] = rng.integers(low, high + 1)
    return validate_matrix(grid.tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
