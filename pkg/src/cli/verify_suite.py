"""
Invariant suite of one coefficient pair, as run by the verify command.
"""
import dataclasses
import logging
import math

import numpy as np

from src.auxiliary.covering import build_covering, covering_identity_deviation
from src.auxiliary.otelbaev import OtelbaevProfile, otelbaev_inequality
from src.auxiliary.width import compute_s, lipschitz_certificate, local_equivalence
from src.coefficients.integrals import classify
from src.green.kernel import GreenKernel, kernel_mass
from src.pfss.construction import PfssOptions, construct_pfss
from src.pfss.system import METHOD_CONSTANT, METHOD_EXPLICIT_MODEL
from src.pfss.verification import (
    davies_harrell_deviation, integral_representation_deviation, verify_pfss
)
from src.utils.constants import (
    WRONSKIAN_TOL, RHO_DERIV_SLACK, LIPSCHITZ_SLACK, KERNEL_MASS_SLACK, DH_TOL_EXPLICIT,
    DH_TOL_NUMERIC, COVERING_TOL, DEFAULT_SEED, QUAD_TOL_FINITE
)
from src.utils.errors import SolvabilityError

SUITE_SPAN = 20.0
DIVERGENCE_X = 1e6
DIVERGENCE_MIN = 10.0
ROOT_RESIDUAL_TOL = 1e-8
LOCAL_EQUIVALENCE_SLACK = 1e-6
KERNEL_FORM_TOL = 1e-8
REPRESENTATION_TOL = 1e-4
REPRESENTATION_SPAN = 5.0


def corrupt_u(sys, factor):
    """The system with u scaled by factor and v left alone; breaks the Wronskian."""
    u, fu = sys.u, sys.flux_u
    return dataclasses.replace(sys, u=lambda x: factor * u(x), flux_u=lambda x: factor * fu(x),
                               provenance={**sys.provenance, 'corrupted_u': factor})


class SuiteRecorder:
    """Collects named checks as value, threshold and pass flag."""

    def __init__(self):
        self.checks = {}

    def upper(self, name, value, threshold):
        value = float(value)
        self.checks[name] = {'value': value, 'threshold': threshold,
                             'passed': bool(math.isfinite(value) and value <= threshold)}

    def lower(self, name, value, threshold):
        value = float(value)
        self.checks[name] = {'value': value, 'threshold': threshold,
                             'passed': bool(math.isfinite(value) and value >= threshold)}

    def failed(self, name, error):
        logging.error(f"Check {name} raised: {error}", exc_info=True)
        self.checks[name] = {'value': None, 'threshold': None, 'passed': False,
                             'error': f"{type(error).__name__}: {error}"}

    @property
    def passed(self):
        return all(c['passed'] for c in self.checks.values())


def run_verify_suite(pair, seed=DEFAULT_SEED, corrupt=None, tol=QUAD_TOL_FINITE):
    """
    Run every invariant check on the pair's principal system.

    Args:
        pair: CoefficientPair
        seed: Seed of all random samples
        corrupt: Optional factor applied to u alone before the checks
        tol: Quadrature tolerance

    Returns:
        dict: {'pair', 'method', 'checks', 'quality', 'passed'}
    """
    rec = SuiteRecorder()
    profile = classify(pair, tol)
    try:
        sys = construct_pfss(pair, PfssOptions(tol=tol), profile)
    except SolvabilityError as e:
        rec.failed('construction', e)
        return {'pair': pair.describe(), 'method': None, 'checks': rec.checks, 'quality': {},
                'passed': False}
    if corrupt is not None:
        sys = corrupt_u(sys, float(corrupt))

    span = min(SUITE_SPAN, 0.25 * sys.domain)
    grid = np.linspace(-span, span, 201)
    rng = np.random.default_rng(seed)

    sys = sys.with_quality(verify_pfss(sys, grid, seed))
    quality = sys.quality
    rec.upper('wronskian', quality.get('wronskian_max_dev', math.inf), WRONSKIAN_TOL)
    rec.upper('sign_violations', quality.get('sign_violations', math.inf), 0)
    rec.upper('rho_derivative', quality.get('max_r_rho_prime', math.inf), 1.0 + RHO_DERIV_SLACK)

    x_far = min(DIVERGENCE_X, 0.5 * sys.domain)
    rec.lower('divergence', min(sys.window_integral(0.0, x_far), sys.window_integral(-x_far, 0.0)),
              DIVERGENCE_MIN)

    explicit = sys.method in (METHOD_CONSTANT, METHOD_EXPLICIT_MODEL)
    try:
        rec.upper('davies_harrell', davies_harrell_deviation(sys, grid[::20], tol),
                  DH_TOL_EXPLICIT if explicit else DH_TOL_NUMERIC)
    except SolvabilityError as e:
        rec.failed('davies_harrell', e)

    reach = min(REPRESENTATION_SPAN, span)
    rec.upper('integral_representation',
              integral_representation_deviation(sys, rng.uniform(-reach, reach, 10),
                                                min(2.0 * reach + 5.0, 0.5 * sys.domain), tol),
              REPRESENTATION_TOL)

    try:
        residual = 0.0
        for x in rng.uniform(-span, span, 20):
            s = compute_s(sys, x)
            residual = max(residual, abs(sys.window_integral(x - s, x + s) - 1.0))
        rec.upper('width_root', residual, ROOT_RESIDUAL_TOL)
        rec.upper('lipschitz', lipschitz_certificate(sys, 100, seed, span), 1.0 + LIPSCHITZ_SLACK)
        worst = local_equivalence(sys, 50, seed, span)
        rec.upper('local_equivalence', max(worst.values()), 1.0 + LOCAL_EQUIVALENCE_SLACK)
    except SolvabilityError as e:
        rec.failed('width', e)

    try:
        covering = build_covering(sys, 0.0, n_max=50)
        rec.upper('covering_identity', covering_identity_deviation(sys, covering), COVERING_TOL)
    except SolvabilityError as e:
        rec.failed('covering_identity', e)

    kernel = GreenKernel(sys)
    xs = rng.uniform(-span, span, 50)
    ts = rng.uniform(-span, span, 50)
    with np.errstate(over='ignore', invalid='ignore'):
        product = kernel.product_form(xs, ts)
    rho_form = kernel.rho_form(xs, ts)
    rec.upper('kernel_forms', float(np.max(np.abs(product - rho_form) / rho_form)), KERNEL_FORM_TOL)
    masses = [kernel_mass(kernel, x, tol) for x in xs]
    rec.upper('kernel_mass', max(masses), 1.0 + KERNEL_MASS_SLACK)

    if profile.condition_1_3 is True:
        try:
            otelbaev = OtelbaevProfile(pair, profile=profile)
            lo, hi = otelbaev_inequality(otelbaev, sys, np.linspace(-span, span, 50))
            rec.lower('otelbaev_lower', lo, 0.5)
            rec.upper('otelbaev_upper', hi, 2.0)
        except SolvabilityError as e:
            rec.failed('otelbaev', e)

    logging.info(f"Verify suite for {pair.label}: passed={rec.passed}")
    return {'pair': pair.describe(), 'method': sys.method, 'checks': rec.checks, 'quality': quality,
            'passed': rec.passed}
