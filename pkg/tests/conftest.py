"""
Shared fixtures for the UPB state toolkit tests
"""

import numpy as np
import pytest

from construction.transform import apply_to_state, random_transform
from construction.upb import UpbParams, build_state, build_upb
from search.product_search import find_product_vectors_in_kernel, find_sixth_vector
from utils.config_loader import SearchConfig, Tolerances
from utils.logger import configure_logging

GENERIC_PARAMS = UpbParams(1.3, 0.7, 2.1, 0.9)


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    configure_logging("WARNING")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def search_config():
    return SearchConfig()


@pytest.fixture(scope="session")
def tolerances():
    return Tolerances()


@pytest.fixture(scope="session")
def generic_params():
    return GENERIC_PARAMS


@pytest.fixture(scope="session")
def generic_upb():
    return build_upb(GENERIC_PARAMS)


@pytest.fixture(scope="session")
def generic_state(generic_upb):
    return build_state(generic_upb)


@pytest.fixture(scope="session")
def generic_transform():
    return random_transform(seed=11, cond_max=20.0)


@pytest.fixture(scope="session")
def transformed_state(generic_state, generic_transform):
    return apply_to_state(generic_transform, generic_state)


@pytest.fixture(scope="session")
def generic_kernel(generic_state, search_config):
    return find_product_vectors_in_kernel(generic_state, search_config)


@pytest.fixture(scope="session")
def generic_sixth(generic_upb, search_config):
    return find_sixth_vector(generic_upb, search_config)


@pytest.fixture(scope="session")
def standard_six(generic_upb, generic_sixth):
    """The five standard-form vectors in order, then the sixth"""
    return list(generic_upb.vectors) + [generic_sixth]