"""
Construction of the principal fundamental system for the supported regimes.

Branches:
    - constant coefficients: closed-form exponentials
    - q identically zero with 1/r integrable: explicit model solutions
    - 1/r and q integrable: backward integration from a cutoff matched to the model
    - tail-positive q otherwise: Riccati sweep for r u'/u and r v'/v
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from src.coefficients.integrals import classify, REGIME_INTEGRABLE
from src.coefficients.pair import Constant
from src.pfss.system import (
    PrincipalSystem, locate_crossing, METHOD_CONSTANT, METHOD_EXPLICIT_MODEL,
    METHOD_MATCHING, METHOD_RICCATI
)
from src.utils.constants import (
    MATCH_TOL, MATCH_EXTENT, MATCH_FACTOR, QUAD_TOL_FINITE, QUAD_TOL_IMPROPER,
    ODE_RTOL, ODE_ATOL, ODE_METHOD, RICCATI_METHOD, RICCATI_DOMAIN, RICCATI_START
)
from src.utils.errors import (
    MatchingFailed, ModelRequiresIntegrableInvR, NonIntegrableTail, PfssUnavailable
)
from src.utils.numerics import adaptive_quad


@dataclass(frozen=True)
class PfssOptions:
    """Knobs of the numerical branches."""
    match_tol: float = MATCH_TOL
    extent: float = MATCH_EXTENT
    tol: float = QUAD_TOL_FINITE


def _as_array(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class PiecewiseSolution:
    """
    solve_ivp runs joined at the breakpoints of q.

    sol(t) dispatches to the run whose interval holds t; t and y concatenate
    the runs in integration order.
    """
    runs: tuple

    @property
    def t(self):
        return np.concatenate([run.t for run in self.runs])

    @property
    def y(self):
        return np.concatenate([run.y for run in self.runs], axis=1)

    def sol(self, t):
        t = _as_array(t)
        flat = np.atleast_1d(t)
        ordered = sorted(self.runs, key=lambda run: run.sol.t_min)
        edges = np.array([run.sol.t_min for run in ordered])
        idx = np.clip(np.searchsorted(edges, flat, side='right') - 1, 0, len(ordered) - 1)
        out = np.empty((self.runs[0].y.shape[0], flat.size))
        for i in np.unique(idx):
            mask = idx == i
            out[:, mask] = ordered[i].sol(flat[mask])
        return out.reshape(out.shape[:1] + t.shape)


def solve_piecewise(rhs, t_span, y0, stops, label, **kwargs):
    """
    solve_ivp with a restart at every stop inside t_span, so that no step jumps
    over a compactly supported feature of the coefficients.

    Raises:
        MatchingFailed: a run did not succeed
    """
    t_start, t_end = t_span
    lo, hi = sorted(t_span)
    inner = sorted({float(s) for s in stops if lo < s < hi}, reverse=t_end < t_start)
    nodes = [t_start, *inner, t_end]
    runs, y = [], y0
    for a, b in zip(nodes[:-1], nodes[1:]):
        run = solve_ivp(rhs, (a, b), y, dense_output=True, **kwargs)
        if not run.success:
            raise MatchingFailed(f"{label}: integration on [{min(a, b):.3g}, {max(a, b):.3g}] "
                                 f"failed: {run.message}")
        runs.append(run)
        y = run.y[:, -1]
    return PiecewiseSolution(tuple(runs))


def _stops(pair):
    return tuple(pair.q.breakpoints) + tuple(pair.inv_r.breakpoints)


def model_pfss(pair):
    """
    Explicit PFSS of the model equation (r z')' = 0.

    u = w0^(-1/2) * integral_x^inf dt/r, v = w0^(-1/2) * integral_-inf^x dt/r.

    Raises:
        ModelRequiresIntegrableInvR: 1/r is not integrable over the line
    """
    try:
        w0 = float(pair.inv_r.total())
    except NonIntegrableTail as e:
        raise ModelRequiresIntegrableInvR(f"{pair.label}: 1/r is not integrable") from e
    if not math.isfinite(w0):
        raise ModelRequiresIntegrableInvR(f"{pair.label}: 1/r is not integrable")

    norm = 1.0 / math.sqrt(w0)
    upper, lower = pair.inv_r.upper_tail, pair.inv_r.lower_tail

    def u(x):
        return norm * upper(_as_array(x))

    def v(x):
        return norm * lower(_as_array(x))

    def rho(x):
        x = _as_array(x)
        return upper(x) * lower(x) / w0

    def log_ratio(x):
        x = _as_array(x)
        with np.errstate(divide='ignore'):
            return np.log(lower(x)) - np.log(upper(x))

    def flux_u(x):
        return np.full_like(_as_array(x), -norm)

    def flux_v(x):
        return np.full_like(_as_array(x), norm)

    x0 = 0.0 if pair.inv_r.even else locate_crossing(log_ratio)
    logging.info(f"Model PFSS for {pair.label}: w0={w0:.12g}, x0={x0:.6g}")
    return PrincipalSystem(u, v, rho, log_ratio, flux_u, flux_v, x0, METHOD_EXPLICIT_MODEL,
                           pair, provenance={'w0': w0})


def constant_pfss(pair):
    """Closed form for r = r0, q = q0 > 0: u = A e^(-m x), v = A e^(m x)."""
    r0, q0 = pair.family.r0, pair.family.q0
    if not q0 > 0.0:
        raise PfssUnavailable(f"{pair.label}: q = 0 with 1/r not integrable has no PFSS")
    m = math.sqrt(q0 / r0)
    amp = 1.0 / math.sqrt(2.0 * m * r0)
    level = amp * amp

    def u(x):
        return amp * np.exp(-m * _as_array(x))

    def v(x):
        return amp * np.exp(m * _as_array(x))

    def rho(x):
        return np.full_like(_as_array(x), level)

    def log_ratio(x):
        return 2.0 * m * _as_array(x)

    def flux_u(x):
        return -r0 * m * u(x)

    def flux_v(x):
        return r0 * m * v(x)

    logging.info(f"Closed-form PFSS for {pair.label}: m={m:.12g}, rho={level:.12g}")
    return PrincipalSystem(u, v, rho, log_ratio, flux_u, flux_v, 0.0, METHOD_CONSTANT, pair,
                           provenance={'m': m, 'amplitude': amp})


def _hartman_wintner_remainder(pair, model, x_cut):
    """Larger of the two tail integrals of q * rho_1 beyond +-x_cut."""
    def integrand(t):
        return float(pair.q(t) * model.rho(t))

    right, _, _ = adaptive_quad(integrand, x_cut, math.inf, QUAD_TOL_IMPROPER * 1e-2)
    left, _, _ = adaptive_quad(integrand, -math.inf, -x_cut, QUAD_TOL_IMPROPER * 1e-2)
    return max(right, left)


def choose_cutoff(pair, model, opts):
    """
    Smallest cutoff on the grid extent * 10^k with remainder below match_tol.

    Returns:
        tuple: (cutoff, remainder, capped)
    """
    x_max = pair.truncation.x_max
    x_cut = min(opts.extent * MATCH_FACTOR, x_max)
    while True:
        remainder = _hartman_wintner_remainder(pair, model, x_cut)
        logging.debug(f"matching cutoff {x_cut:.3g}: remainder {remainder:.3g}")
        if remainder < opts.match_tol:
            return x_cut, remainder, False
        if x_cut >= x_max:
            logging.warning(
                f"{pair.label}: matching remainder {remainder:.3g} above {opts.match_tol:.1g} "
                f"at the truncation limit {x_max:.3g}; continuing with a capped cutoff"
            )
            return x_cut, remainder, True
        x_cut = min(x_cut * MATCH_FACTOR, x_max)


def matched_pfss(pair, opts=None):
    """
    PFSS for 1/r and q integrable, matched to the model solutions at +-X.

    u is integrated backward from X with the model data (u1(X), -w0^(-1/2)).
    ln(v/u) is integrated forward from -X; its derivative is 1/(r u^2 (v/u)) and its
    start value carries the model tail of integral dt/(r u^2) beyond -X. Outside
    [-X, X] the model solutions, scaled to match at the cutoff, continue the system.

    Raises:
        MatchingFailed: u lost positivity or the integrator failed
    """
    opts = opts or PfssOptions()
    model = model_pfss(pair.model_pair())
    w0 = model.provenance['w0']
    norm = 1.0 / math.sqrt(w0)
    x_cut, remainder, capped = choose_cutoff(pair, model, opts)

    inv_r, q = pair.inv_r, pair.q

    def rhs_u(t, y):
        return [y[1] * float(inv_r(t)), float(q(t)) * y[0]]

    z_start = float(model.u(x_cut))
    sol_u = solve_piecewise(rhs_u, (x_cut, -x_cut), [z_start, -norm], _stops(pair),
                            f"{pair.label}: backward integration", method=ODE_METHOD,
                            rtol=ODE_RTOL, atol=[ODE_ATOL * z_start, ODE_ATOL * norm])
    if np.any(sol_u.y[0] <= 0.0):
        raise MatchingFailed(f"{pair.label}: u changed sign on [-{x_cut:.3g}, {x_cut:.3g}]")

    u_left = float(sol_u.sol(-x_cut)[0])
    scale_l = u_left / float(model.u(-x_cut))
    scale_r = float(sol_u.sol(x_cut)[0]) / z_start
    log_c = float(model.log_ratio(-x_cut)) - 2.0 * math.log(scale_l)

    def rhs_log_ratio(t, y):
        z = sol_u.sol(t)[0]
        return [float(inv_r(t)) / (z * z * math.exp(y[0]))]

    sol_l = solve_piecewise(rhs_log_ratio, (-x_cut, x_cut), [log_c], _stops(pair),
                            f"{pair.label}: forward integration", method=ODE_METHOD,
                            rtol=ODE_RTOL, atol=ODE_ATOL * 1e4)

    log_ratio_cut = float(sol_l.sol(x_cut)[0])
    model_vu_cut = math.exp(float(model.log_ratio(x_cut)))

    def _pieces(x):
        x = _as_array(x)
        return x, np.clip(x, -x_cut, x_cut), x > x_cut, x < -x_cut

    def u(x):
        x, xc, right, left = _pieces(x)
        inside = sol_u.sol(xc)[0]
        return np.where(right, scale_r * model.u(x), np.where(left, scale_l * model.u(x), inside))

    def log_ratio(x):
        x, xc, right, left = _pieces(x)
        inside = sol_l.sol(xc)[0]
        with np.errstate(invalid='ignore', divide='ignore', over='ignore'):
            model_lr = model.log_ratio(x)
            grown = np.exp(log_ratio_cut) + (np.exp(model_lr) - model_vu_cut) / scale_r ** 2
            right_val = np.log(grown)
            left_val = model_lr - 2.0 * math.log(scale_l)
        return np.where(right, right_val, np.where(left, left_val, inside))

    def rho(x):
        return np.exp(2.0 * np.log(u(x)) + log_ratio(x))

    def v(x):
        return np.exp(np.log(u(x)) + log_ratio(x))

    def flux_u(x):
        x, xc, right, left = _pieces(x)
        inside = sol_u.sol(xc)[1]
        return np.where(right, -scale_r * norm, np.where(left, -scale_l * norm, inside))

    def flux_v(x):
        uu = u(x)
        with np.errstate(over='ignore'):
            return flux_u(x) * np.exp(log_ratio(x)) + 1.0 / uu

    x0 = locate_crossing(log_ratio)
    provenance = {
        'w0': w0,
        'cutoff': x_cut,
        'scale_left': scale_l,
        'scale_right': scale_r,
        'log_c': log_c,
        'steps': int(sol_u.t.size),
    }
    logging.info(f"Matched PFSS for {pair.label}: X={x_cut:.3g}, x0={x0:.6g}, scale_left={scale_l:.6g}")
    return PrincipalSystem(u, v, rho, log_ratio, flux_u, flux_v, x0, METHOD_MATCHING, pair,
                           quality={'cutoff_remainder': remainder, 'cutoff_capped': capped},
                           provenance=provenance)


def _riccati_start(pair, x, side):
    """Starting value of r z'/z for the principal solution at the far end of one side."""
    speed = math.sqrt(float(pair.q(x)) * float(pair.r(x)))
    tail_fn = pair.inv_r.upper_tail if side > 0 else pair.inv_r.lower_tail
    try:
        tail = float(tail_fn(x))
        extra = 1.0 / tail if tail > 0.0 else 0.0
    except NonIntegrableTail:
        extra = 0.0
    return -side * (speed + extra)


def riccati_pfss(pair, opts=None, domain=RICCATI_DOMAIN, start=RICCATI_START):
    """
    PFSS from the Riccati equations for w_u = r u'/u and w_v = r v'/v.

    w' = q - w^2 / r. w_u is swept backward from +start, w_v forward from -start;
    both directions are contracting for the principal branches. Then
    rho = 1 / (w_v - w_u) and ln(v/u)' = (w_v - w_u) / r with ln(v/u)(0) = 0.

    Raises:
        MatchingFailed: a sweep failed or w_v - w_u lost positivity
    """
    inv_r, q = pair.inv_r, pair.q

    def rhs(t, w):
        return [float(q(t)) - w[0] * w[0] * float(inv_r(t))]

    sweeps = {}
    for side in (1, -1):
        w_start = _riccati_start(pair, side * start, side)
        sweeps[side] = solve_piecewise(rhs, (side * start, -side * domain), [w_start], _stops(pair),
                                       f"{pair.label}: Riccati sweep", method=RICCATI_METHOD,
                                       rtol=ODE_RTOL, atol=1e-300)
    sol_wu, sol_wv = sweeps[1], sweeps[-1]

    def w_u(t):
        return sol_wu.sol(t)[0]

    def w_v(t):
        return sol_wv.sol(t)[0]

    def gap(t):
        return w_v(t) - w_u(t)

    def rhs_log_ratio(t, y):
        return [float(gap(t)) * float(inv_r(t))]

    branches = {}
    for side in (1, -1):
        branches[side] = solve_piecewise(rhs_log_ratio, (0.0, side * domain), [0.0], _stops(pair),
                                         f"{pair.label}: ln(v/u) integration", method=ODE_METHOD,
                                         rtol=ODE_RTOL, atol=ODE_ATOL)

    check = np.linspace(-domain, domain, 2001)
    if np.any(gap(check) <= 0.0):
        raise MatchingFailed(f"{pair.label}: w_v - w_u not positive on the sweep grid")

    def clip(x):
        return np.clip(_as_array(x), -domain, domain)

    def rho(x):
        return 1.0 / gap(clip(x))

    def log_ratio(x):
        xc = clip(x)
        return np.where(xc >= 0.0, branches[1].sol(np.maximum(xc, 0.0))[0],
                        branches[-1].sol(np.minimum(xc, 0.0))[0])

    def u(x):
        return np.sqrt(rho(x)) * np.exp(-0.5 * log_ratio(x))

    def v(x):
        return np.sqrt(rho(x)) * np.exp(0.5 * log_ratio(x))

    def flux_u(x):
        return w_u(clip(x)) * u(x)

    def flux_v(x):
        return w_v(clip(x)) * v(x)

    logging.info(f"Riccati PFSS for {pair.label}: domain={domain:.3g}, start={start:.3g}")
    return PrincipalSystem(u, v, rho, log_ratio, flux_u, flux_v, 0.0, METHOD_RICCATI, pair,
                           domain=domain, provenance={'start': start, 'domain': domain})


def construct_pfss(pair, opts=None, profile=None):
    """
    Build a PFSS with the branch matching the pair.

    Args:
        pair: CoefficientPair
        opts: PfssOptions
        profile: IntegrabilityProfile, computed when omitted

    Raises:
        PfssUnavailable: no branch applies
        MatchingFailed: a numerical branch lost positivity
    """
    opts = opts or PfssOptions()
    if isinstance(pair.family, Constant):
        return constant_pfss(pair)

    profile = profile or classify(pair, opts.tol)
    if pair.q_is_zero:
        if profile.inv_r_L1:
            return model_pfss(pair)
        raise PfssUnavailable(f"{pair.label}: q = 0 and 1/r not integrable, no PFSS exists")
    if profile.regime == REGIME_INTEGRABLE:
        return matched_pfss(pair, opts)
    if profile.condition_2_5:
        return riccati_pfss(pair, opts)
    raise PfssUnavailable(f"{pair.label}: no construction branch applies (regime {profile.regime})")


def davies_harrell_reconstruct(rho, x0, pair, tol=QUAD_TOL_FINITE):
    """
    Rebuild (u, v) from rho and the crossing point.

    u = sqrt(rho) exp(-1/2 integral_x0^x dt/(r rho)), v with the opposite sign.
    Array arguments are integrated piece by piece between sorted neighbours.

    Returns:
        tuple: (u, v) vectorised callables
    """
    def integrand(t):
        return float(pair.inv_r(t) / rho(t))

    def exponent(x):
        x = _as_array(x)
        flat = np.ravel(x)
        nodes = np.unique(np.concatenate((flat, [x0])))
        pieces = []
        for a, b in zip(nodes[:-1], nodes[1:]):
            value, _, ok = adaptive_quad(integrand, a, b, tol)
            if not ok:
                logging.warning(f"Davies-Harrell quadrature on [{a:.6g}, {b:.6g}] did not converge")
            pieces.append(value)
        cumulative = np.concatenate(([0.0], np.cumsum(pieces)))
        origin = cumulative[np.searchsorted(nodes, x0)]
        values = cumulative[np.searchsorted(nodes, flat)] - origin
        return values.reshape(x.shape)

    def u(x):
        return np.sqrt(rho(_as_array(x))) * np.exp(-0.5 * exponent(x))

    def v(x):
        return np.sqrt(rho(_as_array(x))) * np.exp(0.5 * exponent(x))

    return u, v
