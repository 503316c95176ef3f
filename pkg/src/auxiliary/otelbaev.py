"""
Otelbaev auxiliary functions d1, d2, phi, psi, h and d, defined under the limit
condition on window integrals of 1/r and q.
"""
import logging
from dataclasses import dataclass

import numpy as np

from src.coefficients.integrals import classify, integrate_inv_r, integrate_q
from src.utils.constants import ROOT_TOL, QUAD_TOL_FINITE
from src.utils.errors import RegimeError
from src.utils.numerics import adaptive_quad, solve_increasing


@dataclass(frozen=True)
class OtelbaevValues:
    d1: float
    d2: float
    phi: float
    psi: float
    h: float


def _require_limit_condition(pair, profile):
    profile = profile or classify(pair)
    if profile.condition_1_3 is not True:
        raise RegimeError(f"{pair.label}: Otelbaev functions need the limit condition (got "
                          f"{profile.condition_1_3})")
    return profile


def _one_sided_root(pair, x, side, tol):
    # product of the window masses of 1/r and q on [x - d, x] or [x, x + d]
    def objective(d):
        lo, hi = (x - d, x) if side < 0 else (x, x + d)
        return integrate_inv_r(pair, lo, hi) * integrate_q(pair, lo, hi) - 1.0

    return solve_increasing(objective, 0.0, step=1.0, tol=tol,
                            label=f"d{1 if side < 0 else 2}({x:.6g})")


def compute_otelbaev(pair, x, tol=ROOT_TOL, profile=None):
    """
    Evaluate d1, d2, phi, psi and h at x.

    d1 and d2 make the products of window masses of 1/r and q equal to one on
    [x - d1, x] and [x, x + d2]; phi and psi are the 1/r masses of those windows
    and h = phi psi / (phi + psi).

    Raises:
        RegimeError: the limit condition does not hold
    """
    _require_limit_condition(pair, profile)
    x = float(x)
    d1 = _one_sided_root(pair, x, -1, tol)
    d2 = _one_sided_root(pair, x, 1, tol)
    phi = integrate_inv_r(pair, x - d1, x)
    psi = integrate_inv_r(pair, x, x + d2)
    h = phi * psi / (phi + psi)
    return OtelbaevValues(d1, d2, phi, psi, h)


def compute_d(pair, h, x, tol=ROOT_TOL, quad_tol=QUAD_TOL_FINITE):
    """
    Solve integral_{x-d}^{x+d} dt / (r(t) h(t)) = 1 for d > 0.

    Args:
        pair: CoefficientPair
        h: Scalar callable h(t)
        x: Centre
    """
    x = float(x)

    def integrand(t):
        return float(pair.inv_r(t)) / h(t)

    def objective(d):
        value, _, _ = adaptive_quad(integrand, x - d, x + d, quad_tol)
        return value - 1.0

    return solve_increasing(objective, 0.0, step=1.0, tol=tol, label=f"d({x:.6g})")


class OtelbaevProfile:
    """
    Evaluable d1, d2, phi, psi, h and d of one pair.

    The regime is checked once at construction.
    """

    def __init__(self, pair, tol=ROOT_TOL, profile=None):
        self.profile = _require_limit_condition(pair, profile)
        self.pair = pair
        self.tol = tol

    def values(self, x):
        return compute_otelbaev(self.pair, x, self.tol, self.profile)

    def _field(self, name, x):
        if np.ndim(x):
            return np.array([getattr(self.values(t), name) for t in np.ravel(x)]).reshape(np.shape(x))
        return getattr(self.values(x), name)

    def d1(self, x):
        return self._field('d1', x)

    def d2(self, x):
        return self._field('d2', x)

    def phi(self, x):
        return self._field('phi', x)

    def psi(self, x):
        return self._field('psi', x)

    def h(self, x):
        return self._field('h', x)

    def d(self, x):
        if np.ndim(x):
            return np.array([self.d(t) for t in np.ravel(x)]).reshape(np.shape(x))
        return compute_d(self.pair, self.h, x, self.tol)

    def window_q_identity(self, x):
        """|h * integral_{x-d1}^{x+d2} q - 1|, the alternative form of h."""
        vals = self.values(x)
        mass = integrate_q(self.pair, x - vals.d1, x + vals.d2)
        return abs(vals.h * mass - 1.0)

    def samples(self, xs):
        rows = []
        for x in np.asarray(xs, dtype=float):
            rows.append((float(x), float(self.h(x)), float(self.d(x))))
        logging.debug(f"Otelbaev samples at {len(rows)} points")
        return rows


def otelbaev_inequality(otelbaev, sys, xs):
    """
    Range of rho(x) / h(x) over the points; [1/2, 2] under the limit condition.

    Returns:
        tuple: (min ratio, max ratio)
    """
    xs = np.asarray(xs, dtype=float)
    ratios = sys.rho(xs) / otelbaev.h(xs)
    return float(np.min(ratios)), float(np.max(ratios))
