import numpy as np
import pytest

from clampseq.heuristics import Scenario
from clampseq.model import default_model

# The twenty-fastener reference scenario used throughout the suite.
SCENARIO20_HOLES = (1, 2, 3, 6, 8, 10, 11, 14, 16, 18, 19, 22, 24, 26, 27, 30, 32, 34, 35, 38)


@pytest.fixture(scope="session")
def model():
    return default_model()


@pytest.fixture(scope="session")
def scenario20():
    return Scenario(holes=SCENARIO20_HOLES)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
