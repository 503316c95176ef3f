"""
Operator-norm estimates of the Green operator: the L1 column-mass formula,
two-sided weighted Hardy brackets on L_p and empirical probe witnesses.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.utils.constants import (
    QUAD_TOL_FINITE, L1_K_MAX, TREND_K_MAX, PROBE_GRID_POINTS, PROBE_MARGIN,
    PROBE_WIDTH_RANGE, PROBE_CENTER_RANGE, DEFAULT_SEED
)
from src.utils.numerics import adaptive_quad, conjugate_exponent, hardy_constant, trapezoid_weights
from src.utils.trend import (
    DIVERGING, FINITE, classify_history, fit_exponent, shell_points, max_shell, sup_trend
)

METHOD_HARDY = 'HardyBound'
METHOD_L1 = 'L1Exact'
METHOD_PROBE = 'EmpiricalProbe'


@dataclass(frozen=True)
class NormEstimate:
    """
    Bracket lower <= ||K|| <= upper for one operator.

    H_plus and H_minus are the Hardy suprema when the method is HardyBound.
    """
    p: float
    lower: float
    upper: float
    method: str
    H_plus: float = None
    H_minus: float = None
    status: str = FINITE
    operator: str = 'G'
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'p': self.p,
            'lower': self.lower,
            'upper': self.upper,
            'method': self.method,
            'H_plus': self.H_plus,
            'H_minus': self.H_minus,
            'status': self.status,
            'operator': self.operator,
            'details': dict(self.details),
        }

    def table_row(self):
        return (self.p, self.lower, self.upper, self.method)


def _limits(sys):
    if math.isfinite(sys.domain):
        return -sys.domain, sys.domain
    return -math.inf, math.inf


def column_mass(kernel, t, window, tol=QUAD_TOL_FINITE):
    """integral of G(x, t) over |x| <= window."""
    g = kernel.row(t)
    lo, hi = -window, window
    left, _, _ = adaptive_quad(g, lo, min(t, hi), tol) if t > lo else (0.0, 0.0, True)
    right, _, _ = adaptive_quad(g, max(t, lo), hi, tol) if t < hi else (0.0, 0.0, True)
    return left + right


def l1_norm(kernel, tol=QUAD_TOL_FINITE, k_max=L1_K_MAX):
    """
    ||G||_{L1 -> L1} = sup over t of the column mass integral G(x, t) dx.

    Column masses are taken over windows |x| <= 2^k for columns |t| <= 2^k; the
    running supremum is classified by the shared trend rule. A diverging trend
    gives lower = upper = inf.
    """
    sys = kernel.sys
    k_top = max_shell(k_max, 0.5 * sys.domain)
    columns = []
    history, shell_sup = [], []
    arg = float('nan')
    for k in range(k_top + 1):
        window = 2.0 ** max(k, 1)
        columns.extend(shell_points(k))
        masses = np.array([column_mass(kernel, float(t), window, tol) for t in columns])
        i = int(np.argmax(masses))
        history.append(float(masses[i]))
        shell_sup.append(float(masses[i]))
        arg = float(columns[i])
        logging.debug(f"L1 norm: window {window:g}, sup column mass {masses[i]:.8g}")

    status = classify_history(history)
    value = history[-1]
    if status == DIVERGING:
        value = math.inf
    details = {'argsup': arg, 'window': 2.0 ** max(k_top, 1), 'history': history}
    if status != FINITE:
        details['exponent'] = fit_exponent(shell_sup)
        if status != DIVERGING:
            logging.warning(f"L1 norm trend undetermined (last {history[-1]:.6g})")
    return NormEstimate(1.0, value, value, METHOD_L1, status=status, details=details)


def hardy_profile(sys, x, p, tol=QUAD_TOL_FINITE):
    """
    H_p^(+)(x) and H_p^(-)(x) for G2 and G1.

    With a_s = integral_-inf^x (v(t)/v(x))^s dt and b_s = integral_x^inf (u(t)/u(x))^s dt,
    H+ = rho(x) a_p^(1/p) b_p'^(1/p') and H- = rho(x) b_p^(1/p) a_p'^(1/p').
    The ratios are formed from rho and ln(v/u), so no u or v is evaluated.
    """
    pc = conjugate_exponent(p)
    x = float(x)
    rho_x = float(sys.rho(x))
    lr_x = float(sys.log_ratio(x))
    lo, hi = _limits(sys)

    def v_ratio(t, s):
        return (math.sqrt(float(sys.rho(t)) / rho_x) * math.exp(0.5 * (float(sys.log_ratio(t)) - lr_x))) ** s

    def u_ratio(t, s):
        return (math.sqrt(float(sys.rho(t)) / rho_x) * math.exp(-0.5 * (float(sys.log_ratio(t)) - lr_x))) ** s

    a_p, _, _ = adaptive_quad(lambda t: v_ratio(t, p), lo, x, tol)
    a_pc, _, _ = adaptive_quad(lambda t: v_ratio(t, pc), lo, x, tol)
    b_p, _, _ = adaptive_quad(lambda t: u_ratio(t, p), x, hi, tol)
    b_pc, _, _ = adaptive_quad(lambda t: u_ratio(t, pc), x, hi, tol)
    h_plus = rho_x * a_p ** (1.0 / p) * b_pc ** (1.0 / pc)
    h_minus = rho_x * b_p ** (1.0 / p) * a_pc ** (1.0 / pc)
    return h_plus, h_minus


def hardy_bounds(kernel, p, tol=QUAD_TOL_FINITE, k_max=TREND_K_MAX):
    """
    Two-sided Hardy brackets for G1, G2 and G on L_p.

    For G2: H+ <= ||G2|| <= p^(1/p) p'^(1/p') H+, with H+ = sup H_p^(+)(x); G1 uses H-.
    G is bracketed by (H+ + H-) / 2 and p^(1/p) p'^(1/p') (H+ + H-).

    Returns:
        dict: {'G1': NormEstimate, 'G2': NormEstimate, 'G': NormEstimate}
    """
    if not p > 1.0:
        raise ValueError(f"Hardy bounds need p > 1, got {p}")
    sys = kernel.sys
    cache = {}

    def profile(x):
        if x not in cache:
            cache[x] = hardy_profile(sys, x, p, tol)
        return cache[x]

    x_limit = 0.5 * sys.domain
    plus = sup_trend(lambda x: profile(x)[0], k_max, x_limit, vectorized=False, label='H+')
    minus = sup_trend(lambda x: profile(x)[1], k_max, x_limit, vectorized=False, label='H-')
    c_p = hardy_constant(p)

    def bracket(trend, operator):
        if trend.status == DIVERGING:
            return NormEstimate(p, math.inf, math.inf, METHOD_HARDY, plus.value, minus.value,
                                DIVERGING, operator, {'exponent': trend.exponent})
        return NormEstimate(p, trend.value, c_p * trend.value, METHOD_HARDY, plus.value,
                            minus.value, trend.status, operator, {'argsup': trend.argext})

    total = plus.value + minus.value
    if DIVERGING in (plus.status, minus.status):
        g_status, lower, upper = DIVERGING, math.inf, math.inf
    else:
        g_status = FINITE if plus.status == minus.status == FINITE else plus.status
        if g_status == FINITE and minus.status != FINITE:
            g_status = minus.status
        lower, upper = 0.5 * total, c_p * total
    full = NormEstimate(p, lower, upper, METHOD_HARDY, plus.value, minus.value, g_status, 'G',
                        {'hardy_constant': c_p})
    logging.info(f"Hardy bounds p={p}: H+={plus.value:.6g} ({plus.status}), "
                 f"H-={minus.value:.6g} ({minus.status})")
    return {'G1': bracket(minus, 'G1'), 'G2': bracket(plus, 'G2'), 'G': full}


@dataclass(frozen=True)
class BumpProbe:
    """Sum of Gaussian bumps amplitude * exp(-((x - center) / width)^2 / 2)."""
    amplitudes: tuple
    centers: tuple
    widths: tuple

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, c, w in zip(self.amplitudes, self.centers, self.widths):
            out = out + a * np.exp(-0.5 * ((x - c) / w) ** 2)
        return out

    @property
    def support(self):
        lo = min(c - 8.0 * w for c, w in zip(self.centers, self.widths))
        hi = max(c + 8.0 * w for c, w in zip(self.centers, self.widths))
        return lo, hi


def random_bump_probes(count, seed=DEFAULT_SEED, max_bumps=3):
    """Seeded random bump sums with positive amplitudes."""
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(count):
        n = int(rng.integers(1, max_bumps + 1))
        probes.append(BumpProbe(
            amplitudes=tuple(float(a) for a in rng.uniform(0.5, 1.5, n)),
            centers=tuple(float(c) for c in rng.uniform(*PROBE_CENTER_RANGE, n)),
            widths=tuple(float(w) for w in rng.uniform(*PROBE_WIDTH_RANGE, n)),
        ))
    return probes


def probe_grid(probes, margin=PROBE_MARGIN, points=PROBE_GRID_POINTS):
    lo = min(p.support[0] for p in probes) - margin
    hi = max(p.support[1] for p in probes) + margin
    return np.linspace(lo, hi, points)


def empirical_norm_probe(kernel, p, probes, grid=None):
    """
    max over probes of ||K f||_p / ||f||_p for K = G, G1, G2.

    The kernel is discretised on a uniform grid with trapezoid weights; G1 and
    G2 split the diagonal weight in half so that G1 + G2 = G. Zero probes are
    skipped. The result is a lower-bound witness: upper is +inf.

    Returns:
        dict: {'G': NormEstimate, 'G1': NormEstimate, 'G2': NormEstimate}
    """
    probes = list(probes)
    grid = probe_grid(probes) if grid is None else np.asarray(grid, dtype=float)
    weights = trapezoid_weights(grid)
    full = kernel.matrix(grid) * weights[None, :]
    lower_part = np.tril(full, -1) + 0.5 * np.diag(np.diag(full))
    upper_part = np.triu(full, 1) + 0.5 * np.diag(np.diag(full))
    operators = {'G': full, 'G1': lower_part, 'G2': upper_part}

    def lp(values):
        return float(np.sum(weights * np.abs(values) ** p) ** (1.0 / p))

    ratios = {name: [] for name in operators}
    for probe in probes:
        f = probe(grid)
        f_norm = lp(f)
        if f_norm == 0.0:
            logging.debug("skipping zero probe")
            continue
        for name, mat in operators.items():
            ratios[name].append(lp(mat @ f) / f_norm)

    out = {}
    for name, values in ratios.items():
        best = max(values) if values else 0.0
        out[name] = NormEstimate(p, best, math.inf, METHOD_PROBE, operator=name,
                                 details={'ratios': values, 'grid': [float(grid[0]), float(grid[-1]), len(grid)]})
    logging.info(f"Probe witnesses p={p}: G={out['G'].lower:.6g}, G1={out['G1'].lower:.6g}, "
                 f"G2={out['G2'].lower:.6g}")
    return out
