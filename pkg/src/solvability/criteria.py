"""
Solvability criteria of -(r y')' + q y = f on L_p: the width criterion D,
the sufficient conditions sigma_1..sigma_5, the bounded-r nonsolvability test
and the Otelbaev criterion B.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.auxiliary.width import compute_s
from src.coefficients.integrals import classify, integrate_q
from src.coefficients.pair import model_power_law
from src.pfss.construction import model_pfss
from src.utils.constants import TREND_K_MAX, OTELBAEV_K_MAX, ROOT_TOL
from src.utils.errors import RegimeError, SolvabilityError
from src.utils.trend import (
    DIVERGING, FINITE, POSITIVE, UNDETERMINED, VANISHING, growth_trend, inf_trend, sup_trend
)

NOT_APPLICABLE = 'not_applicable'
SATISFIED = 'satisfied'
NOT_SATISFIED = 'not_satisfied'


@dataclass(frozen=True)
class Estimate:
    """
    One criterion value.

    status is finite/diverging/undetermined for suprema, positive/vanishing
    for infima, satisfied/not_satisfied for tests, or not_applicable.
    """
    name: str
    status: str
    value: float = float('nan')
    exponent: float = None
    argext: float = float('nan')
    details: dict = field(default_factory=dict)

    @classmethod
    def from_trend(cls, name, trend, **details):
        return cls(name, trend.status, trend.value, trend.exponent, trend.argext, details)

    @classmethod
    def not_applicable(cls, name, reason):
        return cls(name, NOT_APPLICABLE, details={'reason': reason})

    @property
    def determinate(self):
        return self.status not in (UNDETERMINED, NOT_APPLICABLE)

    def to_dict(self):
        return {
            'name': self.name,
            'status': self.status,
            'value': self.value,
            'exponent': self.exponent,
            'argext': self.argext,
            'details': dict(self.details),
        }


def _s_of(sys, width):
    if width is not None:
        return width.s
    return lambda x: compute_s(sys, x)


def model_rho_asymptote(alpha, x):
    """rho(x) |x|^(2 alpha - 1) (2 alpha - 1) for the model with r = (1 + x^2)^alpha; tends to 1."""
    sys = model_pfss(model_power_law(alpha))
    x = np.asarray(x, dtype=float)
    return sys.rho(x) * np.abs(x) ** (2.0 * alpha - 1.0) * (2.0 * alpha - 1.0)


def predicted_width_ratio(alpha):
    """Lower bound of s(x)/x as x grows, for the model equation with alpha in (1/2, 1)."""
    c = 1.0 / (2.0 * (2.0 * alpha - 1.0))
    return (math.exp(c) - 1.0) / (math.exp(c) + 1.0)


def estimate_D(sys, width=None, k_max=TREND_K_MAX, alpha=None):
    """
    D = sup rho(x) s(x) over the line.

    A finite D is equivalent to correct solvability for every p in (1, inf).
    When the supremum diverges, the fitted growth exponent of rho * s is reported.
    alpha, when given for a power-law r, adds the predicted s(x)/x lower bound
    next to the measured ratio at the largest grid point.
    """
    s_fn = _s_of(sys, width)

    def rho_s(x):
        return float(sys.rho(x)) * s_fn(x)

    trend = sup_trend(rho_s, k_max, 0.5 * sys.domain, vectorized=False, label='D')
    details = {'method': sys.method, 'shells': trend.shells}
    if alpha is not None and trend.status == DIVERGING and 0.5 < alpha < 1.0:
        x_far = 2.0 ** trend.shells
        details['s_over_x_predicted'] = predicted_width_ratio(alpha)
        details['s_over_x_measured'] = s_fn(x_far) / x_far
    logging.info(f"D ({sys.method}): {trend.status}, value {trend.value:.6g}, exponent {trend.exponent}")
    return Estimate.from_trend('D', trend, **details)


@dataclass(frozen=True)
class SigmaRecord:
    sigma1: Estimate
    sigma2: Estimate
    sigma3: Estimate
    sigma4: Estimate
    sigma5: Estimate

    def items(self):
        return [(name, getattr(self, name)) for name in ('sigma1', 'sigma2', 'sigma3', 'sigma4', 'sigma5')]

    def satisfied(self):
        """Names of the criteria that certify correct solvability."""
        out = []
        for name, est in self.items():
            if name in ('sigma3', 'sigma4'):
                if est.status == POSITIVE:
                    out.append(name)
            elif est.status == FINITE:
                out.append(name)
        return out

    def to_dict(self):
        return {name: est.to_dict() for name, est in self.items()}


def sigma4(pair, k_max=TREND_K_MAX):
    """inf q over the line."""
    if pair.q_is_zero:
        return Estimate('sigma4', VANISHING, 0.0)
    trend = inf_trend(pair.q, k_max, pair.truncation.x_max, label='sigma4')
    return Estimate.from_trend('sigma4', trend)


def sigma5(pair, profile=None, k_max=TREND_K_MAX):
    """
    sup r(x) (integral_-inf^x dt/r)^2 (integral_x^inf dt/r)^2, defined when 1/r is integrable.

    Also reports sqrt(r) * integral_x^inf dt/r at the largest grid point, the
    tail quantity whose limit is 1 for r growing like x^2 and 0 for faster growth.
    """
    profile = profile or classify(pair)
    if profile.inv_r_L1 is not True:
        return Estimate.not_applicable('sigma5', '1/r is not integrable')
    upper, lower = pair.inv_r.upper_tail, pair.inv_r.lower_tail

    def f(x):
        return pair.r(x) * (lower(x) * upper(x)) ** 2

    trend = sup_trend(f, k_max, pair.truncation.x_max, vectorized=False, label='sigma5')
    x_far = 2.0 ** trend.shells
    tail_limit = float(np.sqrt(pair.r(x_far)) * upper(x_far))
    return Estimate.from_trend('sigma5', trend, tail_limit=tail_limit)


def sigma_criteria(sys, width, pair, profile=None, k_max=TREND_K_MAX, cheap=None):
    """
    Evaluate sigma_1..sigma_5.

    sigma_1 = sup r rho^2, sigma_2 = sup rho |x|, sigma_3 = inf of the mean of q
    over [x - s(x), x + s(x)], sigma_4 = inf q, sigma_5 as in sigma5().
    Finite sigma_1, sigma_2, sigma_5 or positive sigma_3, sigma_4 each imply
    correct solvability.

    Args:
        cheap: Optional (sigma4, sigma5) already evaluated without the system
    """
    x_limit = 0.5 * sys.domain
    s_fn = _s_of(sys, width)

    def r_rho2(x):
        return pair.r(x) * sys.rho(x) ** 2

    def rho_x(x):
        return sys.rho(x) * np.abs(x)

    def window_mean(x):
        s = s_fn(x)
        return integrate_q(pair, x - s, x + s, ROOT_TOL) / (2.0 * s)

    s1 = Estimate.from_trend('sigma1', sup_trend(r_rho2, k_max, x_limit, label='sigma1'))
    s2 = Estimate.from_trend('sigma2', sup_trend(rho_x, k_max, x_limit, label='sigma2'))
    if pair.q_is_zero:
        s3 = Estimate('sigma3', VANISHING, 0.0)
    else:
        s3 = Estimate.from_trend('sigma3', inf_trend(window_mean, k_max, x_limit, vectorized=False,
                                                     label='sigma3'))
    if cheap is None:
        cheap = (sigma4(pair, k_max), sigma5(pair, profile, k_max))
    record = SigmaRecord(s1, s2, s3, *cheap)
    logging.info(f"Sigma criteria for {pair.label}: satisfied {record.satisfied()}")
    return record


def check_nonsolvability(sys, width, pair, k_max=TREND_K_MAX):
    """
    Bounded-r test: sup r finite and r rho tending to infinity make the
    equation not correctly solvable in any L_p.

    The width argument is unused; r rho alone decides the test.
    """
    x_limit = 0.5 * sys.domain
    sup_r = sup_trend(pair.r, k_max, x_limit, label='sup r')
    if sup_r.status != FINITE:
        return Estimate('nonsolvability', NOT_APPLICABLE, details={
            'reason': 'r is not bounded', 'sup_r': sup_r.to_dict()})

    def r_rho(x):
        return pair.r(x) * sys.rho(x)

    growth = growth_trend(r_rho, k_max, x_limit, label='r rho')
    if growth.status == DIVERGING:
        status = SATISFIED
    elif growth.status == FINITE:
        status = NOT_SATISFIED
    else:
        status = UNDETERMINED
    logging.info(f"Bounded-r nonsolvability test: {status} (sup r {sup_r.value:.6g})")
    return Estimate('nonsolvability', status, growth.value, growth.exponent, growth.argext,
                    {'sup_r': sup_r.value, 'r_rho_trend': growth.status})


def estimate_B(pair, otelbaev, k_max=OTELBAEV_K_MAX):
    """
    B = sup h(x) d(x) from the Otelbaev functions.

    Raises:
        RegimeError: the limit condition fails (raised when the profile is built)
    """
    if otelbaev.profile.condition_1_3 is not True:
        raise RegimeError(f"{pair.label}: B is only defined under the limit condition")

    def h_d(x):
        return otelbaev.h(x) * otelbaev.d(x)

    try:
        trend = sup_trend(h_d, k_max, pair.truncation.x_max, vectorized=False, label='B')
    except SolvabilityError as e:
        logging.error(f"B for {pair.label} failed: {e}", exc_info=True)
        return Estimate('B', UNDETERMINED, details={'error': f"{type(e).__name__}: {e}"})
    logging.info(f"B for {pair.label}: {trend.status}, value {trend.value:.6g}")
    return Estimate.from_trend('B', trend)
