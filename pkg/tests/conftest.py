"""
Shared coefficient pairs and their principal systems.
"""
import pytest

from src.coefficients.pair import composite, constant, model_power_law, power_law
from src.pfss.construction import construct_pfss


@pytest.fixture(scope='module')
def constant_pair():
    return constant(1.0, 1.0)


@pytest.fixture(scope='module')
def constant_sys(constant_pair):
    return construct_pfss(constant_pair)


@pytest.fixture(scope='module')
def model_pair():
    return model_power_law(1.0)


@pytest.fixture(scope='module')
def model_sys(model_pair):
    return construct_pfss(model_pair)


@pytest.fixture(scope='module')
def power_pair():
    return power_law(1.0, 1.0)


@pytest.fixture(scope='module')
def power_sys(power_pair):
    return construct_pfss(power_pair)


@pytest.fixture(scope='module')
def otelbaev_pair():
    # r = 1, q = (1 + x^2)^-1
    return composite({'kind': 'constant', 'value': 1.0}, [{'kind': 'power', 'beta': 1.0}],
                     'unit r, inverse-square q')


@pytest.fixture(scope='module')
def otelbaev_sys(otelbaev_pair):
    return construct_pfss(otelbaev_pair)


@pytest.fixture(scope='module')
def bump_pair():
    return composite({'kind': 'constant', 'value': 1.0}, [{'kind': 'bump', 'height': 1.0}],
                     'unit r, bump q')

