import numpy as np
import pytest

from ugv_backscatter import ScenarioConfig, plan


@pytest.fixture(scope="session")
def table_config():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def table_plan(table_config):
    return plan(table_config)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
