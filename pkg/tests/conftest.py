import numpy as np
import pytest

from morop.problems import REFERENCE_SOLUTIONS, numerical_problem, numerical_scenarios


@pytest.fixture
def num_problem():
    return numerical_problem()


@pytest.fixture
def num_scenarios():
    return numerical_scenarios()


@pytest.fixture
def five():
    ids = list(REFERENCE_SOLUTIONS)
    X = np.array([[REFERENCE_SOLUTIONS[k]] for k in ids])
    return ids, X


ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_lines():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
