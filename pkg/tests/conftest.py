import pytest

from toposdesk.cat import (
    arrow_category,
    simplex_category,
    terminal_category,
)
from toposdesk.simplicial import SSite


@pytest.fixture(scope="session")
def delta1():
    return simplex_category(1)


@pytest.fixture(scope="session")
def delta2():
    return simplex_category(2)


@pytest.fixture(scope="session")
def s1():
    return SSite.simplicial(1)


@pytest.fixture(scope="session")
def s2():
    return SSite.simplicial(2)


@pytest.fixture(scope="session")
def arrow():
    return arrow_category()


@pytest.fixture(scope="session")
def terminal():
    return terminal_category()
