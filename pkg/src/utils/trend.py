"""
Expanding-grid trend policy for suprema, infima and tail series over the real line.

Every criterion of the analysis is an extremum over the whole line. It is
estimated on a core [-1, 1] plus symmetric shells +-[2^(k-1), 2^k], and the
running extremum is classified from its last few doublings.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.utils.constants import (
    TREND_STABLE_REL, TREND_GROWTH_REL, TREND_SHELL_POINTS, TREND_CORE_POINTS,
    TREND_K_MAX, TREND_FIT_SHELLS, SERIES_K_MAX
)

FINITE = 'finite'
DIVERGING = 'diverging'
UNDETERMINED = 'undetermined'
POSITIVE = 'positive'
VANISHING = 'vanishing'


@dataclass(frozen=True)
class TrendResult:
    """Outcome of one expanding-grid estimate."""
    status: str
    value: float
    argext: float = float('nan')
    exponent: float = None
    history: tuple = field(default_factory=tuple)
    shells: int = 0

    def to_dict(self):
        return {
            'status': self.status,
            'value': self.value,
            'argext': self.argext,
            'exponent': self.exponent,
            'shells': self.shells,
        }


def max_shell(k_max=TREND_K_MAX, x_limit=None):
    """Largest shell index allowed by k_max and the numerical domain."""
    if x_limit is None or not math.isfinite(x_limit):
        return k_max
    return max(1, min(k_max, int(math.floor(math.log2(x_limit)))))


def shell_points(k, one_sided=None):
    """
    Sample points of shell k; k = 0 is the core [-1, 1].

    Args:
        k: Shell index
        one_sided: None for both sides, +1 for the positive side, -1 for the negative side
    """
    if k == 0:
        core = np.linspace(-1.0, 1.0, TREND_CORE_POINTS)
        if one_sided is None:
            return core
        return core[core * one_sided >= 0.0]
    pos = np.geomspace(2.0 ** (k - 1), 2.0 ** k, TREND_SHELL_POINTS)
    if one_sided == 1:
        return pos
    if one_sided == -1:
        return -pos[::-1]
    return np.concatenate((-pos[::-1], pos))


def expanding_grid(k_max=TREND_K_MAX, x_limit=None, one_sided=None):
    """All trend sample points up to shell k_max, sorted."""
    k_top = max_shell(k_max, x_limit)
    pts = np.concatenate([shell_points(k, one_sided) for k in range(k_top + 1)])
    return np.unique(pts)


def _evaluate(fn, xs, vectorized):
    if vectorized:
        return np.asarray(fn(xs), dtype=float)
    return np.array([fn(float(x)) for x in xs], dtype=float)


def _relative_steps(history):
    hist = np.asarray(history, dtype=float)
    prev = np.abs(hist[:-1])
    prev[prev == 0.0] = np.finfo(float).tiny
    return (hist[1:] - hist[:-1]) / prev


def fit_exponent(shell_extrema, n_fit=TREND_FIT_SHELLS):
    """
    Least-squares slope of log(extremum) against log(2^k) over the last shells.

    Args:
        shell_extrema: Sequence indexed by shell k (index 0 is the core)

    Returns:
        float or None: The fitted exponent, None when too few positive values
    """
    vals = np.asarray(shell_extrema, dtype=float)
    ks = np.arange(len(vals))
    mask = (ks >= 1) & np.isfinite(vals) & (vals > 0.0)
    ks, vals = ks[mask][-n_fit:], vals[mask][-n_fit:]
    if len(ks) < 2:
        return None
    slope, _ = np.polyfit(ks * math.log(2.0), np.log(vals), 1)
    return float(slope)


def classify_history(history):
    """Classify a running-supremum history by its last doublings."""
    if len(history) >= 4:
        steps = _relative_steps(history[-4:])
        if np.all(steps > TREND_GROWTH_REL):
            return DIVERGING
    if len(history) >= 3:
        steps = _relative_steps(history[-3:])
        if np.all(np.abs(steps) < TREND_STABLE_REL):
            return FINITE
    return UNDETERMINED


def sup_trend(fn, k_max=TREND_K_MAX, x_limit=None, vectorized=True, one_sided=None,
              label='supremum'):
    """
    Estimate sup of fn over the line under the expanding-grid policy.

    Returns:
        TrendResult: status finite/diverging/undetermined, running sup, argmax
        and the growth exponent fitted to the shell maxima
    """
    k_top = max_shell(k_max, x_limit)
    history, shell_max = [], []
    best, best_x = -math.inf, float('nan')
    for k in range(k_top + 1):
        xs = shell_points(k, one_sided)
        vals = _evaluate(fn, xs, vectorized)
        if np.any(np.isnan(vals)):
            logging.warning(f"{label}: NaN samples in shell {k}")
            return TrendResult(UNDETERMINED, float('nan'), best_x, None, tuple(history), k)
        i = int(np.argmax(vals))
        shell_max.append(float(vals[i]))
        if vals[i] > best:
            best, best_x = float(vals[i]), float(xs[i])
        history.append(best)
        if not math.isfinite(best):
            return TrendResult(DIVERGING, math.inf, best_x, None, tuple(history), k)
        logging.debug(f"{label}: shell {k} running sup {best:.6g}")

    status = classify_history(history)
    exponent = fit_exponent(shell_max) if status != FINITE else None
    if status == UNDETERMINED:
        logging.warning(f"{label}: trend undetermined after {k_top} doublings (sup {best:.6g})")
    value = math.inf if status == DIVERGING else best
    return TrendResult(status, value, best_x, exponent, tuple(history), k_top)


def inf_trend(fn, k_max=TREND_K_MAX, x_limit=None, vectorized=True, label='infimum'):
    """
    Estimate inf of a nonnegative fn over the line.

    Returns:
        TrendResult: status positive/vanishing/undetermined with the running infimum
    """
    k_top = max_shell(k_max, x_limit)
    history = []
    best, best_x = math.inf, float('nan')
    for k in range(k_top + 1):
        xs = shell_points(k)
        vals = _evaluate(fn, xs, vectorized)
        i = int(np.nanargmin(vals))
        if vals[i] < best:
            best, best_x = float(vals[i]), float(xs[i])
        history.append(best)
        if best <= 0.0:
            return TrendResult(VANISHING, 0.0, best_x, None, tuple(history), k)

    status = UNDETERMINED
    if len(history) >= 4 and np.all(_relative_steps(history[-4:]) < -TREND_GROWTH_REL):
        status = VANISHING
    elif len(history) >= 3 and np.all(np.abs(_relative_steps(history[-3:])) < TREND_STABLE_REL):
        status = POSITIVE
    if status == UNDETERMINED:
        logging.warning(f"{label}: trend undetermined after {k_top} doublings (inf {best:.6g})")
    return TrendResult(status, 0.0 if status == VANISHING else best, best_x, None,
                       tuple(history), k_top)


def growth_trend(fn, k_max=TREND_K_MAX, x_limit=None, vectorized=True, label='growth'):
    """
    Decide whether fn tends to +infinity at both ends of the line.

    Shell minima are tracked: 'diverging' when they grew by more than the
    growth threshold over each of the last three doublings, 'finite' when they
    stopped moving.
    """
    k_top = max_shell(k_max, x_limit)
    shell_min = []
    for k in range(1, k_top + 1):
        vals = _evaluate(fn, shell_points(k), vectorized)
        shell_min.append(float(np.min(vals)))
    status = UNDETERMINED
    if len(shell_min) >= 4 and np.all(_relative_steps(shell_min[-4:]) > TREND_GROWTH_REL):
        status = DIVERGING
    elif len(shell_min) >= 3 and np.all(np.abs(_relative_steps(shell_min[-3:])) < TREND_STABLE_REL):
        status = FINITE
    logging.debug(f"{label}: shell minima {shell_min[-4:]} -> {status}")
    value = shell_min[-1] if shell_min else float('nan')
    exponent = fit_exponent([float('nan')] + shell_min)
    return TrendResult(status, value, float(2.0 ** k_top), exponent, tuple(shell_min), k_top)


def series_trend(shell_integral, k_max=SERIES_K_MAX, x_limit=None, label='series'):
    """
    Decide convergence of a tail integral from its shell contributions.

    Args:
        shell_integral: Callable (a, b) -> integral over [a, b]; called for the
            core [0, 1] and each shell [2^(k-1), 2^k]
        k_max: Number of doublings

    Returns:
        TrendResult: finite/diverging/undetermined with the last partial sum
    """
    k_top = max_shell(k_max, x_limit)
    partial = [shell_integral(0.0, 1.0)]
    for k in range(1, k_top + 1):
        partial.append(partial[-1] + shell_integral(2.0 ** (k - 1), 2.0 ** k))
        if not math.isfinite(partial[-1]):
            return TrendResult(DIVERGING, math.inf, float(2.0 ** k), None, tuple(partial), k)

    scale = max(np.max(np.abs(partial)), np.finfo(float).tiny)
    increments = np.abs(np.diff(partial))
    status = UNDETERMINED
    if len(increments) >= 2 and np.all(increments[-2:] < TREND_STABLE_REL * scale):
        status = FINITE
    elif len(partial) >= 4 and np.all(_relative_steps(np.abs(partial[-4:])) > TREND_GROWTH_REL):
        status = DIVERGING
    logging.debug(f"{label}: partial sums tail {partial[-3:]} -> {status}")
    value = math.inf if status == DIVERGING else float(partial[-1])
    return TrendResult(status, value, float(2.0 ** k_top), None, tuple(partial), k_top)
