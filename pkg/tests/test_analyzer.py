import dataclasses
import math

import pytest

from src.coefficients.pair import constant, power_law
from src.solvability import analyzer
from src.solvability.analyzer import AnalysisOptions, analyze
from src.solvability.report import (
    CORRECTLY_SOLVABLE, CRITERION_PRIORITY, ERROR, INCONCLUSIVE, NEUTRAL, NOT_CORRECTLY_SOLVABLE,
    NOT_SOLVABLE, SOLVABLE, Evidence, order_evidence
)
from src.utils.trend import DIVERGING, FINITE

FAST = AnalysisOptions(k_max=3)


def _criteria(report, outcome):
    return [e.criterion for e in report.evidence if e.outcome == outcome]


def test_constant_is_solvable(constant_pair):
    report = analyze(constant_pair, 2.0, FAST)
    assert report.verdict == CORRECTLY_SOLVABLE
    assert report.D.value == pytest.approx(0.125, abs=1e-9)
    assert report.B.value == pytest.approx(0.125, abs=1e-8)
    assert {'D', 'B', 'sigma1', 'sigma4'} <= set(_criteria(report, SOLVABLE))
    assert _criteria(report, NOT_SOLVABLE) == []


def test_fast_growth_is_solvable():
    report = analyze(power_law(1.5, 1.0))
    assert report.verdict == CORRECTLY_SOLVABLE
    assert report.D.status == FINITE
    assert 'sigma5' in _criteria(report, SOLVABLE)
    assert report.reduction.valid
    assert report.hartman_wintner.solvable


def test_slow_growth_is_not_solvable():
    report = analyze(power_law(0.75, 1.0))
    assert report.verdict == NOT_CORRECTLY_SOLVABLE
    assert report.D.status == DIVERGING
    assert report.D.exponent == pytest.approx(0.5, abs=0.15)
    assert 'D' in _criteria(report, NOT_SOLVABLE)
    assert report.short_label == 'not'


def test_bump_potential_is_not_solvable(bump_pair):
    report = analyze(bump_pair, 2.0, AnalysisOptions(k_max=12))
    assert report.verdict == NOT_CORRECTLY_SOLVABLE
    assert 'nonsolvability' in _criteria(report, NOT_SOLVABLE)
    assert report.B is None


def test_invalid_reduction_voids_model_evidence(monkeypatch):
    reduce = analyzer.reduce_to_model

    def unbounded_reduction(*args, **kwargs):
        model_pair, certificate = reduce(*args, **kwargs)
        return model_pair, dataclasses.replace(certificate, constant=math.inf)

    monkeypatch.setattr(analyzer, 'reduce_to_model', unbounded_reduction)
    report = analyze(power_law(1.5, 1.0), 2.0, FAST)
    assert not report.reduction.valid
    model_based = {'D', 'sigma1', 'sigma2', 'sigma3', 'nonsolvability'}
    decisive = set(_criteria(report, SOLVABLE)) | set(_criteria(report, NOT_SOLVABLE))
    assert not model_based & decisive
    assert 'D' in _criteria(report, NEUTRAL)


def test_missing_system_is_inconclusive():
    report = analyze(constant(1.0, 0.0))
    assert report.verdict == INCONCLUSIVE
    assert [e.criterion for e in report.evidence if e.outcome == ERROR] == ['construction']
    assert report.D is None
    assert report.to_dict()['sigma4']['status'] == 'vanishing'


def test_p_one_reports_l1_norm(constant_pair):
    report = analyze(constant_pair, 1.0, FAST)
    assert report.verdict == INCONCLUSIVE
    assert report.norm_bounds['G'].upper == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize('p', [0.5, float('inf')])
def test_invalid_p(constant_pair, p):
    with pytest.raises(ValueError):
        analyze(constant_pair, p, FAST)


def test_probes_and_hardy(constant_pair):
    report = analyze(constant_pair, 2.0, AnalysisOptions(k_max=3, probe_count=10, hardy=True))
    assert report.probe['G'].lower <= 1.0 + 1e-6
    assert report.norm_bounds['G2'].lower == pytest.approx(0.25, abs=1e-6)
    realization = [e for e in report.evidence if e.criterion == 'norm_realization']
    assert len(realization) == 1
    assert realization[0].value <= 8.0 + 1e-5


def test_report_serialization(constant_pair):
    payload = analyze(constant_pair, 2.0, FAST).to_dict()
    assert payload['verdict'] == CORRECTLY_SOLVABLE
    for key in ('p', 'pair', 'regime', 'D', 'B', 'evidence', 'sigma1', 'sigma5'):
        assert key in payload
    assert payload['pair']['family'] == 'constant'


def test_evidence_order():
    shuffled = [Evidence('construction', '', ERROR), Evidence('B', '', SOLVABLE),
                Evidence('sigma4', '', SOLVABLE), Evidence('D', '', SOLVABLE)]
    names = [e.criterion for e in order_evidence(shuffled)]
    assert names == ['sigma4', 'D', 'B', 'construction']
    assert CRITERION_PRIORITY[0] == 'sigma4'


@pytest.mark.slow
@pytest.mark.parametrize('alpha', [0.6, 0.75, 0.9, 1.0, 1.5, 2.0])
@pytest.mark.parametrize('beta', [0.75, 1.0, 2.0])
def test_power_law_grid(alpha, beta):
    expected = CORRECTLY_SOLVABLE if alpha >= 1.0 else NOT_CORRECTLY_SOLVABLE
    assert analyze(power_law(alpha, beta)).verdict == expected
