import numpy as np
import pytest

from qqfueter.harness import SuiteConfig, make_context


@pytest.fixture(scope="session")
def config():
    return SuiteConfig()


@pytest.fixture(scope="session")
def ctx(config):
    return make_context(config)


@pytest.fixture()
def rng():
    return np.random.default_rng(20250810)
