import math

import pytest

from src.coefficients.pair import composite, model_power_law, power_law
from src.pfss.construction import model_pfss
from src.solvability.hartman_wintner import (
    ABSOLUTE, EquivalenceCertificate, hartman_wintner_check, perturbation_tail, reduce_to_model
)
from src.utils.errors import ReductionUnavailable
from src.utils.trend import FINITE

GRID = [(alpha, beta) for alpha in (0.6, 0.75, 0.9, 1.0, 1.5, 2.0) for beta in (0.75, 1.0, 2.0)]


@pytest.fixture(scope='module')
def reduction(power_pair):
    return reduce_to_model(power_pair)


@pytest.mark.parametrize('alpha, beta', GRID)
def test_power_law_grid_converges_absolutely(alpha, beta):
    pair = power_law(alpha, beta)
    model = pair.model_pair()
    diagnostics = hartman_wintner_check(pair, model, model_pfss(model))
    assert diagnostics.mode_plus == ABSOLUTE
    assert diagnostics.mode_minus == ABSOLUTE
    assert diagnostics.solvable
    assert diagnostics.I_plus_abs.status == FINITE


def test_model_against_itself(model_pair, model_sys):
    diagnostics = hartman_wintner_check(model_pair, model_pair, model_sys)
    assert diagnostics.I_plus_abs.value == 0.0
    assert diagnostics.mode_plus == ABSOLUTE
    assert diagnostics.ratio_trace == ()


def test_perturbation_tail(power_pair):
    model_sys = model_pfss(power_pair.model_pair())
    assert perturbation_tail(power_pair.q, model_sys, 0.0, 1) == pytest.approx(
        perturbation_tail(power_pair.q, model_sys, 0.0, -1), rel=1e-6)
    assert perturbation_tail(power_pair.q, model_sys, 1e3, 1) < 1e-5


def test_reduction_certificate(reduction):
    model, certificate = reduction
    assert isinstance(certificate, EquivalenceCertificate)
    assert model.q_is_zero
    assert certificate.valid
    assert certificate.constant >= 1.0
    assert certificate.matched_system is not None
    assert certificate.q_upper_tail == pytest.approx(certificate.q_lower_tail, rel=1e-6)


def test_ratio_trace_approaches_one(power_pair, reduction):
    model, certificate = reduction
    diagnostics = hartman_wintner_check(power_pair, model, certificate.model_system,
                                        certificate.matched_system)
    rows = {row[0]: row for row in diagnostics.ratio_trace}
    assert rows[1e3][1] == pytest.approx(1.0, rel=0.1)
    serialized = diagnostics.to_dict()
    assert serialized['ratio_trace'][0]['x'] == 1.0
    assert serialized['mode_minus'] == ABSOLUTE


def test_reduction_without_potential():
    model, certificate = reduce_to_model(model_power_law(1.5))
    assert certificate.constant == 1.0
    assert certificate.matched_system is None
    assert model.q_is_zero


def test_reduction_needs_integrable_inv_r(constant_pair):
    with pytest.raises(ReductionUnavailable):
        reduce_to_model(constant_pair)


def test_reduction_of_composite_pair():
    pair = composite({'kind': 'power', 'alpha': 1.5}, [{'kind': 'bump', 'height': 2.0, 'width': 0.5}])
    model, certificate = reduce_to_model(pair)
    assert certificate.valid
    assert math.isfinite(certificate.q_upper_tail)
