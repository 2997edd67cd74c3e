import random

import pytest

from sidonspaces.field_tower import build_tower
from sidonspaces.reproduce import example_tower


@pytest.fixture(scope="session")
def ex_tower():
    return example_tower()


@pytest.fixture(scope="session")
def t2_3_2():
    return build_tower(2, 1, 3, 2)


@pytest.fixture(scope="session")
def t2_3_3():
    return build_tower(2, 1, 3, 3)


@pytest.fixture(scope="session")
def t3_2_2():
    return build_tower(3, 1, 2, 2)


@pytest.fixture
def rng():
    return random.Random(1234)
