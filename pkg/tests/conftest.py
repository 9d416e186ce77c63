import pytest

from beliefsim.fixtures import load_fixture


@pytest.fixture
def fig21():
    return load_fixture("fig2-1")


@pytest.fixture
def fig22():
    return load_fixture("fig2-2")
