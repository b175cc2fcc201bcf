import itertools

import pytest
from hypothesis import HealthCheck, settings

from ramsey_workbench.catalog import load_catalog
from ramsey_workbench.chains import ChainMap

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def semilattices(catalog):
    return catalog.variety("semilattices")


@pytest.fixture(scope="session")
def groups2(catalog):
    return catalog.variety("exponent-2-groups")


def all_maps(n, k):
    """Every function from n to k as a ChainMap (brute force)."""
    return [ChainMap(n, k, t) for t in itertools.product(range(k), repeat=n)]


def stirling2(n, k):
    """Recurrence S(n,k) = k S(n-1,k) + S(n-1,k-1), written out by table."""
    S = [[0] * (k + 1) for _ in range(n + 1)]
    S[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, k + 1):
            S[i][j] = j * S[i - 1][j] + S[i - 1][j - 1]
    return S[n][k]


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
