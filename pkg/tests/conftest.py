import numpy as np
import pytest

from paraquat import FdConfig, sample_points
from paraquat.catalog import METRICS, TRIPLES, make_chart


@pytest.fixture(scope="session")
def cfg():
    return FdConfig()


@pytest.fixture(scope="session")
def chart4():
    return make_chart(4)


@pytest.fixture(scope="session")
def chart8():
    return make_chart(8)


@pytest.fixture(scope="session")
def flat4(chart4):
    return METRICS["neutral4"](chart4)


@pytest.fixture(scope="session")
def conformal4(chart4):
    return METRICS["conformal-neutral4"](chart4)


@pytest.fixture(scope="session")
def euclidean4(chart4):
    return METRICS["euclidean4"](chart4)


@pytest.fixture(scope="session")
def flat8(chart8):
    return METRICS["neutral8"](chart8)


@pytest.fixture(scope="session")
def std_triple(chart4):
    return TRIPLES["standard4"](chart4)


@pytest.fixture(scope="session")
def rot_triple(chart4):
    return TRIPLES["rotated4"](chart4)


@pytest.fixture(scope="session")
def pts4(chart4):
    return sample_points(chart4, 5, seed=11)


@pytest.fixture(scope="session")
def pts8(chart8):
    return sample_points(chart8, 4, seed=12)
