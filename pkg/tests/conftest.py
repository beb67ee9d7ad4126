import numpy as np
import pytest

from fracchaos import DEFAULT_PARAMS, SystemModel, flagship_equilibria

Q2_REFERENCE = np.array([5.1260, 2.0794, 2.3687])


@pytest.fixture(scope="session")
def flagship():
    return SystemModel.flagship(DEFAULT_PARAMS)


@pytest.fixture(scope="session")
def equilibria():
    return flagship_equilibria(DEFAULT_PARAMS)


@pytest.fixture(scope="session")
def q2(equilibria):
    return equilibria["Q2"].point


def random_cubic_matrix(rng, scale=3.0):
    return rng.normal(scale=scale, size=(3, 3))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
