import pytest

from mapmerge.explorer import explore
from mapmerge.world import initial_config


@pytest.fixture(scope="session")
def graph_n2():
    return explore(initial_config(2))


@pytest.fixture(scope="session")
def graph_n3():
    return explore(initial_config(3))
