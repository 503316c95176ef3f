import math

import numpy as np
import pytest

from src.coefficients.pair import constant
from src.green.kernel import GreenKernel
from src.green.norms import (
    METHOD_HARDY, METHOD_L1, METHOD_PROBE, BumpProbe, column_mass, empirical_norm_probe,
    hardy_bounds, hardy_profile, l1_norm, probe_grid, random_bump_probes
)
from src.pfss.construction import construct_pfss
from src.utils.numerics import hardy_constant
from src.utils.trend import DIVERGING, FINITE


@pytest.fixture(scope='module')
def constant_kernel(constant_sys):
    return GreenKernel(constant_sys)


def test_column_mass(constant_kernel):
    assert column_mass(constant_kernel, 0.0, 2.0) == pytest.approx(1.0 - math.exp(-2.0), abs=1e-9)


@pytest.mark.parametrize('q0', [1.0, 4.0])
def test_l1_norm_constant(q0):
    estimate = l1_norm(GreenKernel(construct_pfss(constant(1.0, q0))))
    assert estimate.method == METHOD_L1
    assert estimate.status == FINITE
    assert estimate.lower == estimate.upper
    assert estimate.upper == pytest.approx(1.0 / q0, abs=1e-6)


def test_l1_norm_model_diverges(model_sys):
    estimate = l1_norm(GreenKernel(model_sys))
    assert estimate.status == DIVERGING
    assert math.isinf(estimate.upper)


def test_hardy_profile_constant(constant_sys):
    h_plus, h_minus = hardy_profile(constant_sys, 0.0, 2.0)
    assert h_plus == pytest.approx(0.25, abs=1e-8)
    assert h_minus == pytest.approx(0.25, abs=1e-8)


def test_hardy_bounds_constant(constant_kernel):
    bounds = hardy_bounds(constant_kernel, 2.0, k_max=4)
    assert set(bounds) == {'G', 'G1', 'G2'}
    g2 = bounds['G2']
    assert g2.method == METHOD_HARDY
    assert g2.lower == pytest.approx(0.25, abs=1e-6)
    assert g2.upper == pytest.approx(0.5, abs=1e-6)
    assert bounds['G'].lower == pytest.approx(0.25, abs=1e-6)
    assert bounds['G'].upper == pytest.approx(hardy_constant(2.0) * 0.5, abs=1e-6)


def test_hardy_bounds_need_p_above_one(constant_kernel):
    with pytest.raises(ValueError):
        hardy_bounds(constant_kernel, 1.0)


def test_random_probes_are_seeded():
    first = random_bump_probes(5, seed=3)
    second = random_bump_probes(5, seed=3)
    assert first == second
    assert all(1 <= len(p.amplitudes) <= 3 for p in first)
    lo, hi = probe_grid(first)[[0, -1]]
    assert lo < min(p.support[0] for p in first) and hi > max(p.support[1] for p in first)


def test_bump_probe_values():
    probe = BumpProbe((2.0,), (1.0,), (0.5,))
    assert float(probe(np.array(1.0))) == pytest.approx(2.0)
    assert probe.support == (-3.0, 5.0)


def test_probe_ratios_respect_hardy_bracket(constant_kernel):
    witnesses = empirical_norm_probe(constant_kernel, 2.0, random_bump_probes(50, seed=0))
    g2 = witnesses['G2']
    assert g2.method == METHOD_PROBE
    assert math.isinf(g2.upper)
    assert all(0.0 < ratio <= 0.5 + 1e-6 for ratio in g2.details['ratios'])
    assert g2.lower > 0.20
    # ||G f|| <= ||G1 f|| + ||G2 f|| probe by probe
    assert witnesses['G'].lower <= witnesses['G1'].lower + g2.lower + 1e-12
    assert witnesses['G'].lower <= 1.0 + 1e-6


def test_narrow_probe_stays_below_l1_norm(constant_kernel):
    witnesses = empirical_norm_probe(constant_kernel, 2.0, [BumpProbe((1.0,), (0.0,), (0.05,))],
                                     np.linspace(-30.0, 30.0, 6001))
    assert witnesses['G'].lower <= 1.0
