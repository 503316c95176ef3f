"""
The width function s(x): the half-width of the window around x on which
dt / (r rho) has unit mass.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.utils.constants import ROOT_TOL, DEFAULT_SEED, LIPSCHITZ_SLACK
from src.utils.errors import BracketingFailed
from src.utils.numerics import solve_increasing
from src.utils.trend import expanding_grid, max_shell


def compute_s(sys, x, tol=ROOT_TOL):
    """
    Solve integral_{x-s}^{x+s} dt / (r rho) = 1 for s > 0.

    F(s) = ln(v/u)(x+s) - ln(v/u)(x-s) is continuous and strictly increasing
    from F(0) = 0; the bracket [0, 1] is doubled until F >= 1.

    Raises:
        BracketingFailed: the window left the system's domain before F reached 1
    """
    x = float(x)
    centre = float(sys.log_ratio(x))

    def objective(s):
        return float(sys.log_ratio(x + s) - sys.log_ratio(x - s)) - 1.0

    hi_limit = None
    if math.isfinite(sys.domain):
        hi_limit = sys.domain - abs(x)
        if hi_limit <= 0.0:
            raise BracketingFailed(f"x={x} lies outside the system domain {sys.domain}", (0.0, 0.0))
    if not math.isfinite(centre):
        raise BracketingFailed(f"ln(v/u) is not finite at x={x}", (0.0, 0.0), centre)
    return solve_increasing(objective, 0.0, step=1.0, tol=tol * 1e-2, hi_limit=hi_limit,
                            label=f"s({x:.6g})")


@dataclass(frozen=True)
class WidthProfile:
    """
    Snapshot of s over a sample grid.

    s itself always calls the root finder; interpolate() reads the cached
    samples and is meant for plot data only.
    """
    sys: object
    tol: float
    xs: np.ndarray
    values: np.ndarray
    lipschitz_certificate: float
    linear_constant: float
    growth_trend: tuple = field(default_factory=tuple)

    def s(self, x):
        if np.ndim(x):
            return np.array([compute_s(self.sys, t, self.tol) for t in np.ravel(x)]).reshape(np.shape(x))
        return compute_s(self.sys, x, self.tol)

    def interpolate(self, x):
        return np.interp(x, self.xs, self.values)

    @property
    def lipschitz_ok(self):
        return self.lipschitz_certificate <= 1.0 + LIPSCHITZ_SLACK

    def to_dict(self):
        return {
            'lipschitz_certificate': self.lipschitz_certificate,
            'linear_constant': self.linear_constant,
            'growth_trend': [dict(zip(('x', 'x_minus_s', 'x_plus_s'), row)) for row in self.growth_trend],
        }


def lipschitz_certificate(sys, n_pairs=100, seed=DEFAULT_SEED, span=50.0, tol=ROOT_TOL):
    """
    Max of |s(x+t) - s(x)| / |t| over random pairs with |t| <= s(x).

    Returns:
        float: The sampled Lipschitz ratio; 1 + 1e-9 bounds it for a genuine PFSS
    """
    rng = np.random.default_rng(seed)
    span = min(span, 0.25 * sys.domain)
    worst = 0.0
    for _ in range(n_pairs):
        x = float(rng.uniform(-span, span))
        s_x = compute_s(sys, x, tol)
        t = float(rng.uniform(-1.0, 1.0)) * s_x
        if t == 0.0:
            continue
        worst = max(worst, abs(compute_s(sys, x + t, tol) - s_x) / abs(t))
    return worst


def build_width_profile(sys, k_max=10, n_pairs=100, seed=DEFAULT_SEED, tol=ROOT_TOL):
    """
    Sample s on the expanding grid and collect its certificates.

    Args:
        sys: PrincipalSystem
        k_max: Largest shell index of the sample grid
        n_pairs: Number of random Lipschitz test pairs
        seed: Seed of the test pairs
        tol: Root tolerance

    Returns:
        WidthProfile
    """
    x_limit = 0.5 * sys.domain
    xs = expanding_grid(k_max, x_limit)
    values = np.array([compute_s(sys, x, tol) for x in xs])
    linear_c = float(np.max(values / (1.0 + np.abs(xs))))

    growth = []
    for k in range(max_shell(k_max, x_limit) + 1):
        for x in (-(2.0 ** k), 2.0 ** k):
            s_x = compute_s(sys, x, tol)
            growth.append((x, x - s_x, x + s_x))

    cert = lipschitz_certificate(sys, n_pairs, seed, tol=tol)
    logging.info(f"Width profile: {len(xs)} samples, Lipschitz {cert:.6g}, c={linear_c:.6g}")
    return WidthProfile(sys, tol, xs, values, cert, linear_c, tuple(growth))


def local_equivalence(sys, n_windows=50, seed=DEFAULT_SEED, span=50.0, tol=ROOT_TOL):
    """
    Worst |ln(f(t)/f(x))| for f in rho, u, v over random t in [x - s(x), x + s(x)].

    Each value is at most 1 for a genuine PFSS: the window carries unit mass of
    dt / (r rho), which bounds rho, u and v within a factor e of their value at x.

    Returns:
        dict: {'rho': float, 'u': float, 'v': float}
    """
    rng = np.random.default_rng(seed)
    span = min(span, 0.25 * sys.domain)
    worst = {'rho': 0.0, 'u': 0.0, 'v': 0.0}
    for _ in range(n_windows):
        x = float(rng.uniform(-span, span))
        s_x = compute_s(sys, x, tol)
        t = x + float(rng.uniform(-1.0, 1.0)) * s_x
        d_rho = math.log(float(sys.rho(t)) / float(sys.rho(x)))
        d_lr = float(sys.log_ratio(t) - sys.log_ratio(x))
        worst['rho'] = max(worst['rho'], abs(d_rho))
        worst['u'] = max(worst['u'], abs(0.5 * d_rho - 0.5 * d_lr))
        worst['v'] = max(worst['v'], abs(0.5 * d_rho + 0.5 * d_lr))
    logging.debug(f"Local equivalence over {n_windows} windows: {worst}")
    return worst
