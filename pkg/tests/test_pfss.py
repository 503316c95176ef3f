import math

import numpy as np
import pytest

from src.cli.verify_suite import corrupt_u
from src.coefficients.pair import constant, model_power_law
from src.pfss.construction import construct_pfss, model_pfss, riccati_pfss
from src.pfss.system import (
    METHOD_CONSTANT, METHOD_EXPLICIT_MODEL, METHOD_MATCHING, METHOD_RICCATI, locate_crossing
)
from src.pfss.verification import (
    davies_harrell_deviation, integral_representation_deviation, verify_pfss
)
from src.solvability.criteria import model_rho_asymptote
from src.utils.errors import ModelRequiresIntegrableInvR, PfssUnavailable
from src.utils.numerics import adaptive_quad


def test_constant_closed_form(constant_sys):
    assert constant_sys.method == METHOD_CONSTANT
    np.testing.assert_allclose(constant_sys.rho(np.linspace(-5.0, 5.0, 11)), 0.5)
    assert constant_sys.x0 == 0.0
    assert float(constant_sys.u(0.0)) == pytest.approx(1.0 / math.sqrt(2.0))
    np.testing.assert_allclose(constant_sys.log_ratio(np.array([-1.0, 2.0])), [-2.0, 4.0])


@pytest.mark.parametrize('r0, q0', [(1.0, 4.0), (2.0, 0.5)])
def test_constant_rho_level(r0, q0):
    sys = construct_pfss(constant(r0, q0))
    m = math.sqrt(q0 / r0)
    assert float(sys.rho(3.0)) == pytest.approx(1.0 / (2.0 * m * r0))
    assert verify_pfss(sys, np.linspace(-20.0, 20.0, 201))['passed']


def test_constant_without_potential_has_no_pfss():
    with pytest.raises(PfssUnavailable):
        construct_pfss(constant(1.0, 0.0))


def test_model_requires_integrable_inv_r():
    with pytest.raises(ModelRequiresIntegrableInvR):
        model_pfss(constant(1.0, 0.0))


def test_model_values(model_sys):
    assert model_sys.method == METHOD_EXPLICIT_MODEL
    assert float(model_sys.u(0.0)) == pytest.approx(0.5 * math.sqrt(math.pi), rel=1e-12)
    assert float(model_sys.rho(0.0)) == pytest.approx(0.25 * math.pi, rel=1e-12)
    assert model_sys.x0 == pytest.approx(0.0, abs=1e-9)


def test_model_verification(model_sys):
    quality = verify_pfss(model_sys, np.linspace(-50.0, 50.0, 101))
    assert quality['passed']
    assert quality['wronskian_max_dev'] < 1e-10
    assert quality['ratio_monotone']
    assert quality['scaling_rho_identical']


def test_model_window_integral_matches_quadrature(model_sys, model_pair):
    value, _, _ = adaptive_quad(
        lambda t: float(model_pair.inv_r(t)) / float(model_sys.rho(t)), -3.0, 5.0, 1e-12)
    assert model_sys.window_integral(-3.0, 5.0) == pytest.approx(value, rel=1e-8)


@pytest.mark.parametrize('alpha', [0.75, 0.9])
def test_model_rho_asymptote(alpha):
    assert abs(float(model_rho_asymptote(alpha, 1e3)) - 1.0) < 0.05


def test_rescaled_keeps_rho(model_sys):
    scaled = model_sys.rescaled(3.0)
    assert scaled.rho is model_sys.rho
    xs = np.linspace(-4.0, 4.0, 9)
    np.testing.assert_allclose(scaled.u(xs) * scaled.v(xs), model_sys.rho(xs), rtol=1e-12)
    assert float(scaled.log_ratio(scaled.x0)) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(ValueError):
        model_sys.rescaled(0.0)


def test_locate_crossing_of_shifted_ratio():
    assert locate_crossing(lambda x: x - 3.25) == pytest.approx(3.25, abs=1e-9)


def test_matched_system(power_sys, power_pair):
    assert power_sys.method == METHOD_MATCHING
    assert power_sys.quality['cutoff_capped'] is False
    quality = verify_pfss(power_sys, np.linspace(-20.0, 20.0, 201))
    assert quality['passed']
    # even coefficients give an even generating function
    xs = np.array([0.5, 3.0, 10.0])
    np.testing.assert_allclose(power_sys.rho(xs), power_sys.rho(-xs), rtol=1e-6)
    assert power_sys.x0 == pytest.approx(0.0, abs=1e-6)


def test_davies_harrell(constant_sys, power_sys):
    grid = np.linspace(-5.0, 5.0, 11)
    assert davies_harrell_deviation(constant_sys, grid) < 1e-6
    assert davies_harrell_deviation(power_sys, grid) < 1e-3


@pytest.mark.parametrize('name', ['constant_sys', 'model_sys', 'power_sys'])
def test_integral_representation(request, name):
    sys = request.getfixturevalue(name)
    assert integral_representation_deviation(sys, np.linspace(-3.0, 3.0, 7), 20.0) < 1e-4


def test_integral_representation_detects_broken_u(constant_sys):
    broken = corrupt_u(constant_sys, 2.0)
    assert integral_representation_deviation(broken, [0.0], 20.0) > 0.4


def test_riccati_system(otelbaev_sys):
    assert otelbaev_sys.method == METHOD_RICCATI
    quality = verify_pfss(otelbaev_sys, np.linspace(-20.0, 20.0, 201))
    assert quality['wronskian_max_dev'] < 1e-6
    assert quality['sign_violations'] == 0


def test_riccati_through_compact_potential(bump_pair):
    sys = riccati_pfss(bump_pair)
    xs = np.array([-50.0, -5.0, 0.0, 5.0, 50.0])
    assert np.all(sys.rho(xs) > 0.0)
    # q vanishes off the bump, so rho grows linearly away from it
    assert float(sys.rho(1e3)) / float(sys.rho(5e2)) == pytest.approx(2.0, rel=0.05)
    assert verify_pfss(sys, np.linspace(-10.0, 10.0, 101))['sign_violations'] == 0


def test_model_of_slow_growth():
    sys = construct_pfss(model_power_law(0.75))
    assert sys.method == METHOD_EXPLICIT_MODEL
    assert sys.provenance['w0'] == pytest.approx(5.2441151, rel=1e-6)
