import numpy as np
import pytest

from nhoc.sleigh import BENCHMARK_INIT, sleigh_model


@pytest.fixture(scope="session")
def sleigh():
    return sleigh_model()


@pytest.fixture(scope="session")
def benchmark_init():
    return np.array(BENCHMARK_INIT)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
