from fractions import Fraction

import pytest

from zvkilling.analysis import IntegralSearch
from zvkilling.metric import hamiltonian, invert, zipoy_voorhees

POINT = {"x": Fraction(1, 2), "y": Fraction(2)}


@pytest.fixture(scope="session")
def zv2():
    return zipoy_voorhees(2)


@pytest.fixture(scope="session")
def h2(zv2):
    return hamiltonian(invert(zv2))


@pytest.fixture(scope="session")
def search6(zv2):
    """Degree-6 search at (1/2, 2); systems and derivative caches are shared between tests."""
    return IntegralSearch(zv2, 6, POINT, rank_method="modular")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
