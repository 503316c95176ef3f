import json
import math

import numpy as np
import pytest

from src.coefficients.densities import BumpDensity, PowerDensity
from src.coefficients.integrals import (
    REGIME_INTEGRABLE, REGIME_LIMIT, REGIME_MODEL, REGIME_OTHER, classify, integrate_inv_r,
    integrate_q
)
from src.coefficients.pair import (
    PowerLaw, composite, constant, load_problem, pair_from_dict, power_law
)
from src.utils.errors import NonIntegrableTail, ProblemFormatError


def test_power_density_integrals():
    density = PowerDensity(1.0)
    assert density.total() == pytest.approx(math.pi, rel=1e-12)
    assert density.upper_tail(0.0) == pytest.approx(0.5 * math.pi, rel=1e-12)
    assert density.integral(-1.0, 1.0) == pytest.approx(0.5 * math.pi, rel=1e-12)
    assert density.lower_tail(-1.0) == pytest.approx(0.25 * math.pi, rel=1e-12)


def test_bump_density_mass():
    bump = BumpDensity(2.0, 0.0, 1.5)
    assert bump.total() == pytest.approx(2.0 * 1.5 * 16.0 / 15.0)
    assert bump.upper_tail(0.0) == pytest.approx(0.5 * bump.total())
    assert bump.upper_tail(5.0) == 0.0
    assert float(bump(2.0)) == 0.0


def test_integrate_inv_r(power_pair, constant_pair):
    assert integrate_inv_r(power_pair, 0.0, math.inf) == pytest.approx(0.5 * math.pi, rel=1e-10)
    assert integrate_q(constant_pair, -1.0, 3.0) == pytest.approx(4.0)
    with pytest.raises(NonIntegrableTail):
        integrate_inv_r(constant_pair, 0.0, math.inf)
    with pytest.raises(ValueError):
        integrate_q(constant_pair, 1.0, 0.0)


def test_inv_r_integral_is_additive_and_monotone(power_pair):
    rng = np.random.default_rng(0)
    for a, b, c in np.sort(rng.uniform(-50.0, 50.0, (20, 3)), axis=1):
        ab = integrate_inv_r(power_pair, a, b)
        bc = integrate_inv_r(power_pair, b, c)
        ac = integrate_inv_r(power_pair, a, c)
        assert ab + bc == pytest.approx(ac, abs=1e-9)
        assert 0.0 <= ab <= ac and 0.0 <= bc <= ac
        assert ac == pytest.approx(math.atan(c) - math.atan(a), abs=1e-9)


def test_classify_regimes(constant_pair, model_pair, power_pair, otelbaev_pair):
    const = classify(constant_pair)
    assert const.inv_r_L1 is False
    assert const.condition_1_3 is True
    assert const.regime == REGIME_LIMIT

    assert classify(model_pair).regime == REGIME_MODEL

    power = classify(power_pair)
    assert power.regime == REGIME_INTEGRABLE
    assert power.condition_1_3 is False
    assert power.w0 == pytest.approx(math.pi)

    otelbaev = classify(otelbaev_pair)
    assert otelbaev.regime == REGIME_LIMIT
    assert otelbaev.condition_2_5 is True


def test_bump_pair_classification(bump_pair):
    profile = classify(bump_pair)
    assert profile.q_L1 is True
    # q vanishes on both tails, so the window products stay bounded
    assert profile.condition_1_3 is False
    assert profile.condition_2_5 is True
    assert profile.condition_2_20 is False
    assert profile.regime == REGIME_OTHER


UNIT_R = {'kind': 'constant', 'value': 1.0}
FAST_R = {'kind': 'power', 'alpha': 1.5}


@pytest.mark.parametrize('r_spec, q_specs, limit, tails', [
    (UNIT_R, [{'kind': 'power', 'beta': 1.0}, {'kind': 'bump', 'height': 1.0}], True, True),
    (FAST_R, [{'kind': 'constant', 'value': 2.0}], True, True),
    (FAST_R, [{'kind': 'power', 'beta': 1.0}], False, True),
    (UNIT_R, [{'kind': 'bump', 'height': 1.0, 'center': 5e3, 'width': 10.0}], False, False),
])
def test_limit_condition_per_side(r_spec, q_specs, limit, tails):
    profile = classify(composite(r_spec, q_specs))
    assert profile.condition_1_3 is limit
    assert profile.condition_2_20 is tails


def test_limit_condition_never_contradicts_tail_positivity(bump_pair, constant_pair, otelbaev_pair):
    for pair in (bump_pair, constant_pair, otelbaev_pair):
        profile = classify(pair)
        if profile.condition_1_3 is True:
            assert profile.condition_2_20 is True


@pytest.mark.parametrize('alpha, beta', [(0.5, 1.0), (1.0, 0.4)])
def test_power_law_rejects_small_exponents(alpha, beta):
    with pytest.raises(ProblemFormatError):
        power_law(alpha, beta)


def test_constant_rejects_bad_values():
    with pytest.raises(ProblemFormatError):
        constant(-1.0, 1.0)
    with pytest.raises(ProblemFormatError):
        constant(1.0, -1.0)


def test_pair_from_dict():
    pair = pair_from_dict({'family': 'power_law', 'alpha': 1.5, 'beta': 1})
    assert pair.family == PowerLaw(1.5, 1.0)
    assert pair.describe()['alpha'] == 1.5
    with pytest.raises(ProblemFormatError):
        pair_from_dict({'family': 'spline'})
    with pytest.raises(ProblemFormatError):
        pair_from_dict({'family': 'power_law', 'alpha': 1.5})


def test_tabulated_pair_from_dict():
    doc = {
        'family': 'tabulated',
        'points': [[-2.0, 5.0, 0.2], [0.0, 1.0, 1.0], [2.0, 5.0, 0.2]],
        'tail': {'r_exponent': 2.0, 'q_exponent': -2.0},
    }
    pair = pair_from_dict(doc)
    assert float(pair.r(0.0)) == pytest.approx(1.0)
    assert float(pair.q(1.0)) == pytest.approx(0.6)
    assert classify(pair).inv_r_L1 is True


def test_load_problem(tmp_path):
    path = tmp_path / 'problem.json'
    path.write_text(json.dumps({'family': 'constant', 'r0': 2.0, 'q0': 8.0}), encoding='utf-8')
    pair = load_problem(path)
    assert float(pair.r(3.0)) == pytest.approx(2.0)

    with pytest.raises(ProblemFormatError):
        load_problem(tmp_path / 'missing.json')
    broken = tmp_path / 'broken.json'
    broken.write_text('{"family": ', encoding='utf-8')
    with pytest.raises(ProblemFormatError):
        load_problem(broken)


def test_model_pair_drops_q(power_pair):
    model = power_pair.model_pair()
    assert model.q_is_zero
    assert model.inv_r is power_pair.inv_r
