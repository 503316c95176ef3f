"""
The Green kernel G(x, t) = u(max(x, t)) v(min(x, t)) and its action on right-hand sides.

G1 f(x) = u(x) * integral_-inf^x v f and G2 f(x) = v(x) * integral_x^inf u f,
so that G f = G1 f + G2 f.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from src.utils.constants import QUAD_TOL_FINITE, FD_STEP_REL
from src.utils.errors import NonConvergentRow
from src.utils.numerics import adaptive_quad


@dataclass(frozen=True)
class RightHandSide:
    """
    A right-hand side f with the interval outside which it vanishes (or is negligible).

    Attributes:
        fn: Vectorised callable
        support: (lo, hi); infinite ends allowed
        label: Name used in reports
    """
    fn: object
    support: tuple = (-math.inf, math.inf)
    label: str = 'f'
    breakpoints: tuple = ()

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    @property
    def is_zero(self):
        return self.support[0] >= self.support[1]


def gaussian_rhs(sigma=1.0):
    """Normal density with standard deviation sigma, negligible beyond 40 sigma."""
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    return RightHandSide(lambda x: norm * np.exp(-0.5 * (x / sigma) ** 2),
                         (-40.0 * sigma, 40.0 * sigma), 'gaussian')


def indicator_rhs(lo=-1.0, hi=1.0):
    return RightHandSide(lambda x: np.where((x >= lo) & (x <= hi), 1.0, 0.0),
                         (lo, hi), f'indicator[{lo}, {hi}]')


def zero_rhs():
    return RightHandSide(lambda x: np.zeros_like(x), (0.0, 0.0), 'zero')


class GreenKernel:
    """
    Green kernel of a PrincipalSystem.

    The product form is used where u and v are finite and nonzero; the
    representation through rho and ln(v/u) is the overflow-safe fallback.
    """

    def __init__(self, sys):
        self.sys = sys

    def product_form(self, x, t):
        x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
        hi, lo = np.maximum(x, t), np.minimum(x, t)
        with np.errstate(over='ignore', invalid='ignore'):
            return self.sys.u(hi) * self.sys.v(lo)

    def rho_form(self, x, t):
        x, t = np.asarray(x, dtype=float), np.asarray(t, dtype=float)
        gap = np.abs(self.sys.log_ratio(x) - self.sys.log_ratio(t))
        return np.sqrt(self.sys.rho(x) * self.sys.rho(t)) * np.exp(-0.5 * gap)

    def __call__(self, x, t):
        value = self.product_form(x, t)
        bad = ~np.isfinite(value) | (value <= 0.0)
        if np.any(bad):
            value = np.where(bad, self.rho_form(x, t), value)
        return value if np.ndim(value) else float(value)

    def row(self, x):
        """Scalar callable t -> G(x, t) in the overflow-safe form."""
        x = float(x)
        rho_x = float(self.sys.rho(x))
        lr_x = float(self.sys.log_ratio(x))

        def g(t):
            return math.sqrt(rho_x * float(self.sys.rho(t))) * math.exp(
                -0.5 * abs(lr_x - float(self.sys.log_ratio(t))))
        return g

    def matrix(self, xs, ts=None):
        xs = np.asarray(xs, dtype=float)
        ts = xs if ts is None else np.asarray(ts, dtype=float)
        rho_x, rho_t = self.sys.rho(xs), self.sys.rho(ts)
        lr_x, lr_t = self.sys.log_ratio(xs), self.sys.log_ratio(ts)
        return np.sqrt(np.outer(rho_x, rho_t)) * np.exp(-0.5 * np.abs(lr_x[:, None] - lr_t[None, :]))


def green_eval(kernel, x, t):
    """G(x, t) = u(max) v(min); positive and symmetric."""
    return kernel(x, t)


def green_matrix(kernel, xs, ts=None):
    return kernel.matrix(xs, ts)


def _row_integral(g, f, lo, hi, tol, breakpoints, label):
    if lo >= hi:
        return 0.0
    value, _, ok = adaptive_quad(lambda t: g(t) * float(f(t)), lo, hi, tol, breakpoints)
    if not ok:
        raise NonConvergentRow(f"{label} on [{lo}, {hi}] did not converge")
    return value


def apply_green_split(kernel, f, x, tol=QUAD_TOL_FINITE):
    """
    Return ((G1 f)(x), (G2 f)(x)).

    The diagonal t = x is the split point of the two row integrals.

    Raises:
        NonConvergentRow: a row integral failed to converge
    """
    if f.is_zero:
        return 0.0, 0.0
    x = float(x)
    g = kernel.row(x)
    lo, hi = f.support
    g1 = _row_integral(g, f, lo, min(x, hi), tol, f.breakpoints, f"G1 {f.label}({x:.6g})")
    g2 = _row_integral(g, f, max(x, lo), hi, tol, f.breakpoints, f"G2 {f.label}({x:.6g})")
    return g1, g2


def apply_green(kernel, f, x, tol=QUAD_TOL_FINITE):
    """(G f)(x) = (G1 f)(x) + (G2 f)(x)."""
    g1, g2 = apply_green_split(kernel, f, x, tol)
    return g1 + g2


def solution_flux(kernel, f, x, tol=QUAD_TOL_FINITE):
    """
    r y' at x for y = G f.

    y = u A + v B with A = integral_-inf^x v f and B = integral_x^inf u f,
    hence r y' = (r u') A + (r v') B.
    """
    if f.is_zero:
        return 0.0
    sys = kernel.sys
    x = float(x)
    lo, hi = f.support

    def v_f(t):
        return float(sys.v(t)) * float(f(t))

    def u_f(t):
        return float(sys.u(t)) * float(f(t))

    a_part, b_part = 0.0, 0.0
    if lo < x:
        a_part, _, ok = adaptive_quad(v_f, lo, min(x, hi), tol, f.breakpoints)
        if not ok:
            raise NonConvergentRow(f"flux integral A at {x} did not converge")
    if hi > x:
        b_part, _, ok = adaptive_quad(u_f, max(x, lo), hi, tol, f.breakpoints)
        if not ok:
            raise NonConvergentRow(f"flux integral B at {x} did not converge")
    return float(sys.flux_u(x)) * a_part + float(sys.flux_v(x)) * b_part


def equation_residual(kernel, f, xs, tol=QUAD_TOL_FINITE, h_rel=FD_STEP_REL):
    """
    |-(r y')' + q y - f| at the points, with (r y')' by central differences of the flux.

    Returns:
        np.ndarray: Residual per point
    """
    pair = kernel.sys.pair
    out = []
    for x in np.asarray(xs, dtype=float):
        h = h_rel * (1.0 + abs(x))
        d_flux = (solution_flux(kernel, f, x + h, tol) - solution_flux(kernel, f, x - h, tol)) / (2.0 * h)
        y = apply_green(kernel, f, x, tol)
        out.append(abs(-d_flux + float(pair.q(x)) * y - float(f(x))))
    residual = np.array(out)
    logging.debug(f"equation residual max {residual.max() if residual.size else 0.0:.3g}")
    return residual


def kernel_mass(kernel, x, tol=QUAD_TOL_FINITE):
    """integral q(t) G(x, t) dt over the line; at most 1 for a genuine Green kernel."""
    sys = kernel.sys
    g = kernel.row(x)
    pair = sys.pair

    def integrand(t):
        return float(pair.q(t)) * g(t)

    lo, hi = (-sys.domain, sys.domain) if math.isfinite(sys.domain) else (-math.inf, math.inf)
    breakpoints = getattr(pair.q, 'breakpoints', ())
    left, _, _ = adaptive_quad(integrand, lo, float(x), tol, breakpoints)
    right, _, _ = adaptive_quad(integrand, float(x), hi, tol, breakpoints)
    return left + right
