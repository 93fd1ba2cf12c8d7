import random

import pytest

from enbtorus.enb import find_curve_setup
from enbtorus.torus import check_params


@pytest.fixture(scope="session")
def setup_15():
    return find_curve_setup(239, 15, seed=0)


@pytest.fixture(scope="session")
def params_15():
    return check_params(15, 239)


@pytest.fixture(scope="session")
def ctx_15(setup_15):
    return setup_15.ctx


@pytest.fixture
def rng():
    return random.Random(20240607)
