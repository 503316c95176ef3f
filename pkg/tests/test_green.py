import math

import numpy as np
import pytest

from src.auxiliary.width import compute_s
from src.coefficients.pair import power_law
from src.green.kernel import (
    GreenKernel, RightHandSide, apply_green, apply_green_split, equation_residual, gaussian_rhs,
    green_eval, green_matrix, indicator_rhs, kernel_mass, solution_flux, zero_rhs
)
from src.pfss.construction import construct_pfss
from src.solvability.criteria import estimate_D


@pytest.fixture(scope='module')
def constant_kernel(constant_sys):
    return GreenKernel(constant_sys)


def test_constant_kernel_values(constant_kernel):
    assert green_eval(constant_kernel, 0.0, 0.0) == pytest.approx(0.5)
    assert green_eval(constant_kernel, 0.0, 1.0) == pytest.approx(0.5 * math.exp(-1.0))
    assert green_eval(constant_kernel, 1.0, 0.0) == pytest.approx(green_eval(constant_kernel, 0.0, 1.0))


def test_kernel_diagonal_is_rho(model_sys):
    kernel = GreenKernel(model_sys)
    xs = np.array([-7.0, 0.0, 2.5])
    np.testing.assert_allclose(np.diag(green_matrix(kernel, xs)), model_sys.rho(xs), rtol=1e-12)


def test_kernel_forms_agree(power_sys):
    kernel = GreenKernel(power_sys)
    xs, ts = np.meshgrid(np.linspace(-15.0, 15.0, 13), np.linspace(-10.0, 12.0, 7))
    xs, ts = xs.ravel(), ts.ravel()
    product = kernel.product_form(xs, ts)
    np.testing.assert_allclose(kernel.rho_form(xs, ts), product, rtol=1e-8)
    np.testing.assert_allclose(kernel(xs, ts), product, rtol=1e-12)


def test_rescaled_system_keeps_width_d_and_kernel(power_sys):
    scaled = power_sys.rescaled(3.0)
    for x in (-8.0, 0.0, 2.5, 15.0):
        assert compute_s(scaled, x) == pytest.approx(compute_s(power_sys, x), rel=1e-8)
    d, d_scaled = estimate_D(power_sys, k_max=4), estimate_D(scaled, k_max=4)
    assert d_scaled.status == d.status
    assert d_scaled.value == pytest.approx(d.value, rel=1e-8)
    xs, ts = np.meshgrid(np.linspace(-10.0, 10.0, 9), np.linspace(-6.0, 12.0, 5))
    xs, ts = xs.ravel(), ts.ravel()
    np.testing.assert_allclose(GreenKernel(scaled)(xs, ts), GreenKernel(power_sys)(xs, ts), rtol=1e-10)
    np.testing.assert_allclose(GreenKernel(scaled).rho_form(xs, ts), GreenKernel(power_sys).rho_form(xs, ts),
                               rtol=1e-10)


def test_kernel_row_matches_matrix(model_sys):
    kernel = GreenKernel(model_sys)
    row = kernel.row(1.5)
    ts = np.array([-4.0, 0.0, 1.5, 9.0])
    np.testing.assert_allclose([row(t) for t in ts], kernel.matrix([1.5], ts)[0], rtol=1e-12)


def test_indicator_solution(constant_kernel):
    f = indicator_rhs(-1.0, 1.0)
    assert apply_green(constant_kernel, f, 0.0) == pytest.approx(1.0 - math.exp(-1.0), abs=1e-8)
    g1, g2 = apply_green_split(constant_kernel, f, 0.0)
    assert g1 == pytest.approx(g2, abs=1e-10)
    assert g1 + g2 == pytest.approx(apply_green(constant_kernel, f, 0.0))


def test_zero_rhs(constant_kernel):
    f = zero_rhs()
    assert f.is_zero
    assert apply_green(constant_kernel, f, 3.0) == 0.0
    assert solution_flux(constant_kernel, f, 3.0) == 0.0


def test_solution_flux_of_constant_kernel(constant_kernel):
    # y = 1 - e^-1 cosh x on [-1, 1], so r y' = -e^-1 sinh x
    f = indicator_rhs(-1.0, 1.0)
    assert solution_flux(constant_kernel, f, 0.5) == pytest.approx(-math.exp(-1.0) * math.sinh(0.5),
                                                                  abs=1e-8)


def test_kernel_mass(constant_kernel, otelbaev_sys):
    assert kernel_mass(constant_kernel, 0.0) == pytest.approx(1.0, abs=1e-6)
    assert kernel_mass(GreenKernel(otelbaev_sys), 2.0) <= 1.0 + 1e-6


def test_residual_constant(constant_kernel):
    residual = equation_residual(constant_kernel, gaussian_rhs(), np.array([-2.0, 0.3, 1.7]))
    assert np.max(residual) < 1e-4


def test_residual_power_law():
    kernel = GreenKernel(construct_pfss(power_law(1.5, 1.0)))
    residual = equation_residual(kernel, gaussian_rhs(), np.array([-3.0, -0.5, 0.0, 2.0]))
    assert np.max(residual) < 1e-4


def test_right_hand_side_support():
    f = RightHandSide(lambda x: np.ones_like(x), (2.0, 1.0), 'empty')
    assert f.is_zero
    assert gaussian_rhs().support == (-40.0, 40.0)
