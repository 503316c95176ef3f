"""
Asymptotic equivalence of an equation with its q = 0 model and the reduction
of the integrable regime to that model.

With delta_q = q - q1 and rho1 the generating function of the model, the
principal solutions of the two equations are asymptotically equivalent at
+infinity when I+(0) = integral_0^inf delta_q rho1 converges absolutely, or
converges conditionally and integral_0^inf I+(x)^2 / (r rho1) dx is finite.
The -infinity side is the mirror image.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.coefficients.integrals import classify
from src.pfss.construction import PfssOptions, matched_pfss, model_pfss
from src.utils.constants import QUAD_TOL_IMPROPER, QUAD_TOL_FINITE, SERIES_K_MAX, TREND_K_MAX
from src.utils.errors import ReductionUnavailable, SolvabilityError
from src.utils.numerics import adaptive_quad
from src.utils.trend import FINITE, UNDETERMINED, expanding_grid, series_trend

ABSOLUTE = 'absolute'
CONDITIONAL = 'conditional'
RATIO_TRACE_POINTS = (1.0, 10.0, 1e2, 1e3, 1e4)
EQ218_K_MAX = 20


@dataclass(frozen=True)
class HartmanWintnerDiagnostics:
    """
    Convergence record of the perturbation integrals on both sides.

    Attributes:
        delta_q: Vectorised q - q1
        I_plus_abs, I_minus_abs: TrendResult of the integrals of |delta_q| rho1
        eq218_plus, eq218_minus: TrendResult of the squared-remainder integrals, or None
        ratio_trace: Rows (x, rho/rho1, u/u1 at x, v/v1 at -x)
        mode_plus, mode_minus: 'absolute', 'conditional' or 'undetermined'
    """
    delta_q: object
    I_plus_abs: object
    I_minus_abs: object
    eq218_plus: object = None
    eq218_minus: object = None
    ratio_trace: tuple = field(default_factory=tuple)
    mode_plus: str = UNDETERMINED
    mode_minus: str = UNDETERMINED

    @property
    def solvable(self):
        return self.mode_plus != UNDETERMINED and self.mode_minus != UNDETERMINED

    def to_dict(self):
        def trend(t):
            return None if t is None else t.to_dict()

        return {
            'I_plus_abs': trend(self.I_plus_abs),
            'I_minus_abs': trend(self.I_minus_abs),
            'eq218_plus': trend(self.eq218_plus),
            'eq218_minus': trend(self.eq218_minus),
            'mode_plus': self.mode_plus,
            'mode_minus': self.mode_minus,
            'ratio_trace': [dict(zip(('x', 'rho_ratio', 'u_ratio', 'v_ratio'), row))
                            for row in self.ratio_trace],
        }


def _side_integral(fn, side):
    """Shell integral callable (a, b) -> integral over [a, b] (side +1) or [-b, -a] (side -1)."""
    def shell(a, b):
        lo, hi = (a, b) if side > 0 else (-b, -a)
        value, _, _ = adaptive_quad(fn, lo, hi, QUAD_TOL_FINITE * 1e-2)
        return value
    return shell


def perturbation_tail(delta_q, model_sys, x, side):
    """I+(x) = integral_x^inf delta_q rho1 (side +1) or I-(x) = integral_-inf^x (side -1)."""
    def integrand(t):
        return float(delta_q(t)) * float(model_sys.rho(t))

    lo, hi = (x, math.inf) if side > 0 else (-math.inf, x)
    value, _, _ = adaptive_quad(integrand, lo, hi, QUAD_TOL_IMPROPER * 1e-2)
    return value


def eq218_integral(delta_q, model_sys, pair, side, k_max=EQ218_K_MAX):
    """
    Series trend of integral_0^inf I+(x)^2 / (r rho1) dx (mirrored for side -1).

    The tail I(x) is itself an improper quadrature at every node.
    """
    def integrand(x):
        tail = perturbation_tail(delta_q, model_sys, x, side)
        return tail * tail * float(pair.inv_r(x)) / float(model_sys.rho(x))

    return series_trend(_side_integral(integrand, side), k_max,
                        label=f"squared remainder {'+' if side > 0 else '-'}")


def hartman_wintner_check(pair, model_pair, model_sys, matched_sys=None, k_max=SERIES_K_MAX):
    """
    Decide asymptotic equivalence of the pair with its model on both sides.

    Absolute convergence of the perturbation integral settles a side. When it
    is undetermined, the signed integral and the squared-remainder integral
    are examined. A ratio trace is attached when a matched system is given.

    Returns:
        HartmanWintnerDiagnostics
    """
    q, q1 = pair.q, model_pair.q

    def delta_q(x):
        return q(x) - q1(x)

    def abs_integrand(t):
        return abs(float(delta_q(t))) * float(model_sys.rho(t))

    def signed_integrand(t):
        return float(delta_q(t)) * float(model_sys.rho(t))

    absolute, eq218, modes = {}, {}, {}
    for side in (1, -1):
        label = f"|delta q| rho1 {'+' if side > 0 else '-'}"
        trend = series_trend(_side_integral(abs_integrand, side), k_max, label=label)
        absolute[side] = trend
        eq218[side] = None
        if trend.status == FINITE:
            modes[side] = ABSOLUTE
            continue
        signed = series_trend(_side_integral(signed_integrand, side), k_max,
                              label=label.replace('|delta q|', 'delta q'))
        if signed.status == FINITE:
            eq218[side] = eq218_integral(delta_q, model_sys, pair, side)
            modes[side] = CONDITIONAL if eq218[side].status == FINITE else UNDETERMINED
        else:
            modes[side] = UNDETERMINED

    trace = ()
    if matched_sys is not None:
        trace = ratio_trace(matched_sys, model_sys)

    diagnostics = HartmanWintnerDiagnostics(delta_q, absolute[1], absolute[-1], eq218[1], eq218[-1],
                                            trace, modes[1], modes[-1])
    logging.info(f"Asymptotic equivalence for {pair.label}: +inf {modes[1]}, -inf {modes[-1]}")
    return diagnostics


def ratio_trace(sys, model_sys, points=RATIO_TRACE_POINTS):
    """Rows (x, rho(x)/rho1(x), u(x)/u1(x), v(-x)/v1(-x))."""
    rows = []
    for x in points:
        rows.append((
            float(x),
            float(sys.rho(x) / model_sys.rho(x)),
            float(sys.u(x) / model_sys.u(x)),
            float(sys.v(-x) / model_sys.v(-x)),
        ))
    return tuple(rows)


@dataclass(frozen=True)
class EquivalenceCertificate:
    """
    Evidence that rho and the model rho1 are bounded by each other.

    Attributes:
        q_lower_tail: integral_-inf^0 q(x) (integral_-inf^x dt/r) dx
        q_upper_tail: integral_0^inf q(x) (integral_x^inf dt/r) dx
        constant: Measured max of rho/rho1 and rho1/rho on the analysis grid
        model_system: PFSS of the model
        matched_system: PFSS of the pair, None for q = 0
    """
    q_lower_tail: float
    q_upper_tail: float
    constant: float
    model_system: object = None
    matched_system: object = None
    argmax: float = float('nan')

    @property
    def valid(self):
        return math.isfinite(self.constant)

    def to_dict(self):
        return {
            'q_lower_tail': self.q_lower_tail,
            'q_upper_tail': self.q_upper_tail,
            'constant': self.constant,
            'argmax': self.argmax,
            'matched': self.matched_system is not None,
        }


def _q_tail_moments(pair):
    inv_r, q = pair.inv_r, pair.q

    def right(x):
        return float(q(x)) * float(inv_r.upper_tail(x))

    def left(x):
        return float(q(x)) * float(inv_r.lower_tail(x))

    upper, _, ok_u = adaptive_quad(right, 0.0, math.inf, QUAD_TOL_IMPROPER)
    lower, _, ok_l = adaptive_quad(left, -math.inf, 0.0, QUAD_TOL_IMPROPER)
    return lower, upper, ok_l and ok_u


def reduce_to_model(pair, profile=None, opts=None, k_max=TREND_K_MAX):
    """
    Reduce the pair to its q = 0 model and certify weak equivalence of rho and rho1.

    Needs 1/r integrable and the two q-moments of the tails of 1/r finite.

    Returns:
        tuple: (model pair, EquivalenceCertificate)

    Raises:
        ReductionUnavailable: a precondition fails or the matched system cannot be built
    """
    profile = profile or classify(pair)
    if profile.inv_r_L1 is not True:
        raise ReductionUnavailable(f"{pair.label}: 1/r is not integrable")
    model_pair = pair.model_pair()
    model_sys = model_pfss(model_pair)
    if pair.q_is_zero:
        return model_pair, EquivalenceCertificate(0.0, 0.0, 1.0, model_sys, None, 0.0)

    lower, upper, ok = _q_tail_moments(pair)
    if not (ok and math.isfinite(lower) and math.isfinite(upper)):
        raise ReductionUnavailable(f"{pair.label}: q-moments of the tails of 1/r do not converge")

    try:
        matched = matched_pfss(pair, opts or PfssOptions())
    except SolvabilityError as e:
        raise ReductionUnavailable(f"{pair.label}: matched system unavailable: {e}") from e

    grid = expanding_grid(k_max)
    ratio = matched.rho(grid) / model_sys.rho(grid)
    spread = np.maximum(ratio, 1.0 / ratio)
    i = int(np.argmax(spread))
    constant = float(spread[i]) if np.all(np.isfinite(spread)) else math.inf
    logging.info(f"Reduced {pair.label} to its model: constant {constant:.6g}, "
                 f"tail moments ({lower:.6g}, {upper:.6g})")
    return model_pair, EquivalenceCertificate(lower, upper, constant, model_sys, matched, float(grid[i]))
