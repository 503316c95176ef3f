"""
Numerical building blocks: adaptive quadrature, bracketed root finding,
finite differences and grid norms.
"""
import logging
import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad, trapezoid
from scipy.optimize import brentq

from src.utils.constants import (
    QUAD_LIMIT, ROOT_RTOL, MAX_BRACKET_DOUBLINGS, FD_STEP_REL
)
from src.utils.errors import BracketingFailed


def adaptive_quad(fn, a, b, tol, breakpoints=None):
    """
    Integrate a scalar function with adaptive Gauss-Kronrod quadrature.

    Infinite endpoints are accepted; scipy maps them to a finite interval.
    Breakpoints (kinks of the integrand) split the range into pieces that are
    integrated separately.

    Args:
        fn: Scalar integrand
        a: Lower limit, may be -inf
        b: Upper limit, may be +inf
        tol: Absolute error target
        breakpoints: Optional iterable of interior points where fn is not smooth

    Returns:
        tuple: (value, error_estimate, converged)
    """
    if a == b:
        return 0.0, 0.0, True
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0

    cuts = [a]
    if breakpoints is not None:
        cuts.extend(sorted(p for p in breakpoints if a < p < b))
    cuts.append(b)

    total, error, converged = 0.0, 0.0, True
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always', IntegrationWarning)
            value, err = quad(fn, lo, hi, epsabs=tol, epsrel=1e-12, limit=QUAD_LIMIT)
        if any(issubclass(w.category, IntegrationWarning) for w in caught):
            logging.debug(f"Quadrature on [{lo}, {hi}] reported: {caught[-1].message}")
            converged = False
        total += value
        error += err
    if not math.isfinite(total):
        converged = False
    return sign * total, error, converged


def solve_increasing(fn, lo, step=1.0, tol=1e-12, hi_limit=None, label='objective'):
    """
    Find the root of an increasing function with fn(lo) <= 0.

    The bracket [lo, lo + step] is grown by doubling the step until the
    function changes sign, then refined with Brent's method.

    Args:
        fn: Continuous nondecreasing scalar function
        lo: Left end with fn(lo) <= 0
        step: Initial bracket width
        tol: Absolute tolerance on the root
        hi_limit: Optional bound the bracket may not cross
        label: Name used in log and error messages

    Returns:
        float: The root
    """
    f_lo = fn(lo)
    if f_lo == 0.0:
        return lo
    if f_lo > 0.0:
        raise BracketingFailed(f"{label}: positive at the left end {lo}", (lo, lo), f_lo)

    hi = lo + step
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if hi_limit is not None and hi > hi_limit:
            raise BracketingFailed(
                f"{label}: bracket left the numerical domain at {hi_limit}",
                (lo, hi_limit), f_lo,
            )
        f_hi = fn(hi)
        if not math.isfinite(f_hi):
            raise BracketingFailed(f"{label}: non-finite value at {hi}", (lo, hi), f_hi)
        if f_hi >= 0.0:
            break
        lo, f_lo = hi, f_hi
        step *= 2.0
        hi = lo + step
    else:
        raise BracketingFailed(f"{label}: no sign change after doubling", (lo, hi), f_lo)

    if f_hi == 0.0:
        return hi
    logging.debug(f"{label}: bracket [{lo}, {hi}]")
    return brentq(fn, lo, hi, xtol=tol, rtol=ROOT_RTOL, maxiter=200)


def bisect_monotone(fn, lo, hi, tol):
    """
    Locate the sign change of a monotone function on [lo, hi] by bisection.

    Returns:
        float: Midpoint of the final bracket
    """
    f_lo = fn(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def central_difference(fn, x, h_rel=FD_STEP_REL):
    """Central difference of a vectorised function with step h_rel * (1 + |x|)."""
    x = np.asarray(x, dtype=float)
    h = h_rel * (1.0 + np.abs(x))
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def lp_norm(values, grid, p):
    """L_p norm of sampled values by the trapezoidal rule."""
    return float(trapezoid(np.abs(values) ** p, grid) ** (1.0 / p))


def trapezoid_weights(grid):
    """Trapezoidal quadrature weights for a sorted grid."""
    grid = np.asarray(grid, dtype=float)
    weights = np.zeros_like(grid)
    gaps = np.diff(grid)
    weights[:-1] += 0.5 * gaps
    weights[1:] += 0.5 * gaps
    return weights


def conjugate_exponent(p):
    """Return p' with 1/p + 1/p' = 1."""
    return p / (p - 1.0)


def hardy_constant(p):
    """The factor p^(1/p) * p'^(1/p') bounding a weighted Hardy operator by its H value."""
    pc = conjugate_exponent(p)
    return p ** (1.0 / p) * pc ** (1.0 / pc)
