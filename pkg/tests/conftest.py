import numpy as np
import pytest

from zetamoments.config import DEFAULT
from zetamoments.zerofinder import build_cache


@pytest.fixture(scope="session")
def cfg():
    return DEFAULT


@pytest.fixture(scope="session")
def cache_1000():
    return build_cache(1000.0)


@pytest.fixture(scope="session")
def cache_10000():
    return build_cache(10000.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
