import numpy as np
import pytest

from tcpkit import fixtures as fx

CRITERIA_RESULTS = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERIA_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_RESULTS):
            terminalreporter.write_line(line)


@pytest.fixture
def e1():
    return fx.E1()


@pytest.fixture
def e2():
    return fx.E2()


@pytest.fixture
def e3bar():
    return fx.E3_bar()


@pytest.fixture
def e4():
    return fx.E4()


@pytest.fixture
def identity32():
    return fx.identity(3, 2)


def fd_jacobian(f, x, h=1e-5):
    """Central-difference Jacobian of a vector map, used as the oracle
    against analytic Jacobians."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    f0 = np.asarray(f(x))
    J = np.zeros((len(f0), n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h)
    return J
