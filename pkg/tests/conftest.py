import pytest

from omrouter.config import parse_config
from omrouter.steady import solve_steady_state


@pytest.fixture(scope="session")
def default_cfg():
    """Built-in defaults, isolated from the ambient environment."""
    return parse_config(env={})


@pytest.fixture(scope="session")
def params_on(default_cfg):
    return default_cfg.system_params()


@pytest.fixture(scope="session")
def params_off(default_cfg):
    return default_cfg.system_params(power_p=0.0)


@pytest.fixture(scope="session")
def state_on(params_on):
    return solve_steady_state(params_on)


@pytest.fixture(scope="session")
def state_off(params_off):
    return solve_steady_state(params_off)
