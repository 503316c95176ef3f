"""
The analysis pipeline: classify the pair, build a principal system (directly or
through the q = 0 model), evaluate every applicable criterion and reconcile
them into a verdict.
"""
import logging
import math
from dataclasses import dataclass

from src.auxiliary.otelbaev import OtelbaevProfile
from src.coefficients.integrals import classify, REGIME_INTEGRABLE
from src.coefficients.pair import PowerLaw
from src.green.kernel import GreenKernel
from src.green.norms import empirical_norm_probe, hardy_bounds, l1_norm, random_bump_probes
from src.pfss.construction import PfssOptions, construct_pfss
from src.solvability.criteria import (
    Estimate, SigmaRecord, SATISFIED, NOT_APPLICABLE, check_nonsolvability, estimate_B,
    estimate_D, sigma4, sigma5, sigma_criteria
)
from src.solvability.hartman_wintner import hartman_wintner_check, reduce_to_model
from src.solvability.report import (
    CORRECTLY_SOLVABLE, INCONCLUSIVE, NOT_CORRECTLY_SOLVABLE, ERROR, NEUTRAL, NOT_SOLVABLE,
    SOLVABLE, Evidence, SolvabilityReport, order_evidence
)
from src.utils.constants import (
    QUAD_TOL_FINITE, MATCH_TOL, TREND_K_MAX, OTELBAEV_K_MAX, DEFAULT_P, DEFAULT_SEED,
    ROOT_TOL, NORM_REALIZATION_CAP
)
from src.utils.errors import SolvabilityError
from src.utils.trend import DIVERGING, FINITE

HARDY_K_MAX = 10

SIGMA_BASIS = {
    'sigma1': 'sup r rho^2 is finite',
    'sigma2': 'sup rho |x| is finite',
    'sigma3': 'means of q over the windows [x - s, x + s] are bounded below',
    'sigma4': 'q is bounded below by a positive constant',
    'sigma5': 'sup r (integral_-inf^x dt/r)^2 (integral_x^inf dt/r)^2 is finite',
}
SYSTEM_SIGMAS = ('sigma1', 'sigma2', 'sigma3')


@dataclass(frozen=True)
class AnalysisOptions:
    """
    Knobs of one analysis.

    Attributes:
        tol: Quadrature tolerance on finite intervals
        match_tol: Remainder tolerance of the matching cutoff
        k_max: Largest doubling exponent of the expanding grid
        direct_pfss: In the integrable regime, also evaluate D on the matched system
        probe_count: Number of random probes for the norm witnesses; 0 disables them
        seed: Probe seed
        hardy: Evaluate the Hardy brackets of the Green operator
    """
    tol: float = QUAD_TOL_FINITE
    match_tol: float = MATCH_TOL
    k_max: int = TREND_K_MAX
    direct_pfss: bool = False
    probe_count: int = 0
    seed: int = DEFAULT_SEED
    hardy: bool = False

    def pfss_options(self):
        return PfssOptions(match_tol=self.match_tol, tol=self.tol)


def _not_applicable_sigma(cheap):
    reason = 'no principal system'
    return SigmaRecord(Estimate.not_applicable('sigma1', reason), Estimate.not_applicable('sigma2', reason),
                       Estimate.not_applicable('sigma3', reason), *cheap)


def _carried(outcome, certificate):
    """Outcome of a criterion read off the model system; an invalid certificate voids it."""
    if certificate is not None and not certificate.valid:
        return NEUTRAL
    return outcome


def _d_evidence(name, est, certificate=None):
    if certificate is not None:
        if not certificate.valid:
            return Evidence(name, 'model and equation generating functions are not comparable', NEUTRAL,
                            est.value)
        basis = (f"sup rho s of the q = 0 model, carried over through rho ~ rho1 "
                 f"(constant {certificate.constant:.4g})")
    else:
        basis = 'sup rho s over the line'
    if est.status == FINITE:
        return Evidence(name, basis + ' is finite', SOLVABLE, est.value)
    if est.status == DIVERGING:
        return Evidence(name, basis + ' diverges', NOT_SOLVABLE, est.exponent)
    return Evidence(name, basis + ' is undetermined', NEUTRAL, est.value)


def _decide(evidence, p):
    solvable = [e.criterion for e in evidence if e.outcome == SOLVABLE]
    not_solvable = [e.criterion for e in evidence if e.outcome == NOT_SOLVABLE]
    if p == 1.0:
        return INCONCLUSIVE
    if solvable and not_solvable:
        logging.error(f"Criteria disagree: solvable by {solvable}, not solvable by {not_solvable}")
        return INCONCLUSIVE
    if solvable:
        return CORRECTLY_SOLVABLE
    if not_solvable:
        return NOT_CORRECTLY_SOLVABLE
    return INCONCLUSIVE


def analyze(pair, p=DEFAULT_P, opts=None):
    """
    Decide correct solvability of -(r y')' + q y = f in L_p.

    Args:
        pair: CoefficientPair
        p: Exponent in (1, inf); p = 1 yields only the L1 norm diagnostic
        opts: AnalysisOptions

    Returns:
        SolvabilityReport

    Raises:
        ValueError: p < 1 or p infinite
    """
    opts = opts or AnalysisOptions()
    if not (p >= 1.0 and math.isfinite(p)):
        raise ValueError(f"p must lie in [1, inf), got {p}")
    logging.info(f"Analyzing {pair.label} in L_{p}")

    profile = classify(pair, opts.tol)
    evidence = []
    cheap = (sigma4(pair, opts.k_max), sigma5(pair, profile, opts.k_max))

    sys, certificate, hw = None, None, None
    try:
        if profile.regime == REGIME_INTEGRABLE and not pair.q_is_zero:
            model_pair, certificate = reduce_to_model(pair, profile, opts.pfss_options(), opts.k_max)
            sys = certificate.model_system
            hw = hartman_wintner_check(pair, model_pair, certificate.model_system,
                                       certificate.matched_system)
            evidence.append(Evidence('reduction', 'q = 0 model with measured rho / rho1 spread', NEUTRAL,
                                     certificate.constant))
            evidence.append(Evidence('hartman_wintner', 'convergence of the perturbation integrals',
                                     NEUTRAL, f"{hw.mode_plus}/{hw.mode_minus}"))
        else:
            sys = construct_pfss(pair, opts.pfss_options(), profile)
    except SolvabilityError as e:
        logging.error(f"Principal system for {pair.label} unavailable: {e}", exc_info=True)
        evidence.append(Evidence('construction', 'no principal fundamental system could be built',
                                 ERROR, f"{type(e).__name__}: {e}"))
        report = SolvabilityReport(INCONCLUSIVE, p, profile.to_dict(), sigma=_not_applicable_sigma(cheap),
                                   evidence=tuple(order_evidence(evidence)), pair=pair.describe())
        logging.info(f"Verdict for {pair.label}: {report.verdict}")
        return report

    alpha = pair.family.alpha if isinstance(pair.family, PowerLaw) else None
    D = estimate_D(sys, None, opts.k_max, alpha)
    evidence.append(_d_evidence('D', D, certificate))
    kernel_sys = sys
    if certificate is not None and certificate.matched_system is not None:
        kernel_sys = certificate.matched_system
        if opts.direct_pfss:
            evidence.append(_d_evidence('D_direct', estimate_D(kernel_sys, None, opts.k_max, alpha)))

    sigma = sigma_criteria(sys, None, pair, profile, opts.k_max, cheap)
    for name in sigma.satisfied():
        outcome = _carried(SOLVABLE, certificate) if name in SYSTEM_SIGMAS else SOLVABLE
        evidence.append(Evidence(name, SIGMA_BASIS[name], outcome, getattr(sigma, name).value))

    nonsolvability = check_nonsolvability(sys, None, pair, opts.k_max)
    if nonsolvability.status == SATISFIED:
        evidence.append(Evidence('nonsolvability', 'r is bounded while r rho grows without bound',
                                 _carried(NOT_SOLVABLE, certificate), nonsolvability.value))

    B = None
    if profile.condition_1_3 is True:
        try:
            otelbaev = OtelbaevProfile(pair, ROOT_TOL, profile)
            B = estimate_B(pair, otelbaev, min(opts.k_max, OTELBAEV_K_MAX))
        except SolvabilityError as e:
            logging.error(f"B for {pair.label} failed: {e}", exc_info=True)
            B = Estimate('B', NOT_APPLICABLE, details={'error': f"{type(e).__name__}: {e}"})
        if B.status == FINITE:
            evidence.append(Evidence('B', 'sup h d is finite', SOLVABLE, B.value))
        elif B.status == DIVERGING:
            evidence.append(Evidence('B', 'sup h d diverges', NOT_SOLVABLE, B.exponent))

    kernel = GreenKernel(kernel_sys)
    norm_bounds, probe = {}, {}
    if p == 1.0:
        l1 = l1_norm(kernel, opts.tol)
        norm_bounds = {'G': l1}
        evidence.append(Evidence('l1_norm', 'sup of the column masses of G', NEUTRAL, l1.upper))
    elif opts.hardy:
        norm_bounds = hardy_bounds(kernel, p, opts.tol, min(opts.k_max, HARDY_K_MAX))

    verdict = _decide(evidence, p)

    if opts.probe_count > 0 and p > 1.0:
        probe = empirical_norm_probe(kernel, p, random_bump_probes(opts.probe_count, opts.seed))
        if verdict == CORRECTLY_SOLVABLE and D.status == FINITE and D.value > 0.0:
            realization = probe['G'].lower / D.value
            if realization > NORM_REALIZATION_CAP:
                logging.warning(f"Probe ratio over D is {realization:.4g} for {pair.label}")
            evidence.append(Evidence('norm_realization', 'max probe ratio of G divided by D', NEUTRAL,
                                     realization))

    report = SolvabilityReport(
        verdict=verdict,
        p=p,
        regime=profile.to_dict(),
        D=D,
        sigma=sigma,
        B=B,
        hartman_wintner=hw,
        nonsolvability=nonsolvability,
        reduction=certificate,
        norm_bounds=norm_bounds,
        probe=probe,
        evidence=tuple(order_evidence(evidence)),
        pair=pair.describe(),
    )
    logging.info(f"Verdict for {pair.label}: {verdict}")
    return report
