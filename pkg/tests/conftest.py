import numpy as np
import pytest

from fpnni import config, model


@pytest.fixture(scope="session")
def example1_cfg():
    return config.parse_config(config.bundled_config_path("example1"))


@pytest.fixture(scope="session")
def example2_cfg():
    return config.parse_config(config.bundled_config_path("example2"))


@pytest.fixture(scope="session")
def example1_system(example1_cfg):
    return model.resolve_anchor(config.build_system(example1_cfg))


@pytest.fixture(scope="session")
def example2_system(example2_cfg):
    return model.resolve_anchor(config.build_system(example2_cfg))


@pytest.fixture(scope="session")
def example1_equilibrium():
    return np.array([0.5, 1.5])


@pytest.fixture(scope="session")
def example2_equilibrium():
    return np.array([-0.3, -0.4])
