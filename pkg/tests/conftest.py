import numpy as np
import pytest

from abcrigid.dynamics import row_bound_stats
from abcrigid.group import IntegerMatrix


@pytest.fixture
def A2345():
    return IntegerMatrix(((2, 3), (4, 5)))


@pytest.fixture
def bs12():
    return IntegerMatrix(((2,),))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(autouse=True)
def _row_bound_guard():
    """Every displacement matrix built during a test must satisfy the row/column norm bound."""
    before = row_bound_stats.violations
    yield
    assert row_bound_stats.violations == before


def random_nonsingular(rng, n, bound=3):
    while True:
        rows = rng.integers(-bound, bound + 1, size=(n, n))
        if round(np.linalg.det(rows)) != 0:
            return IntegerMatrix(tuple(tuple(int(x) for x in r) for r in rows))


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.format_results():
            terminalreporter.write_line(line)
