"""
Coverings of a semi-axis by abutting segments [x_n - kappa(x_n), x_n + kappa(x_n)].
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from src.auxiliary.width import compute_s
from src.utils.constants import COVERING_TOL
from src.utils.errors import CoveringStalled
from src.utils.numerics import solve_increasing

RIGHTWARD = 'rightward'
LEFTWARD = 'leftward'


@dataclass(frozen=True)
class Covering:
    """
    Segments ordered away from the anchor.

    Attributes:
        direction: 'rightward' or 'leftward'
        anchor: The point the first segment starts from
        segments: Tuple of (center, half_width)
        truncated: True when the domain ended before n_max segments
    """
    direction: str
    anchor: float
    segments: tuple
    truncated: bool = False

    @property
    def centers(self):
        return np.array([c for c, _ in self.segments])

    def inner_edges(self):
        sign = 1.0 if self.direction == RIGHTWARD else -1.0
        return np.array([c - sign * k for c, k in self.segments])

    def outer_edges(self):
        sign = 1.0 if self.direction == RIGHTWARD else -1.0
        return np.array([c + sign * k for c, k in self.segments])

    def max_gap(self):
        """Largest mismatch between a segment's outer edge and the next inner edge."""
        if len(self.segments) < 2:
            return 0.0
        return float(np.max(np.abs(self.outer_edges()[:-1] - self.inner_edges()[1:])))


def build_covering(sys, x, kappa=None, direction=RIGHTWARD, n_max=50, tol=COVERING_TOL,
                   x_limit=None):
    """
    Build n_max abutting segments from the anchor x.

    Each new center y solves y - kappa(y) = previous outer edge (mirrored for
    the leftward direction). kappa defaults to the width function of sys.

    Raises:
        CoveringStalled: a half-width collapsed to machine scale; carries the partial covering
    """
    if kappa is None:
        def kappa(t):
            return compute_s(sys, t)
    if direction not in (RIGHTWARD, LEFTWARD):
        raise ValueError(f"unknown covering direction: {direction}")
    sign = 1.0 if direction == RIGHTWARD else -1.0
    if x_limit is None:
        x_limit = 0.5 * sys.domain if sys is not None else math.inf

    segments = []
    edge = float(x)
    truncated = False
    for n in range(1, n_max + 1):
        target = sign * edge

        def objective(z):
            return z - kappa(sign * z) - target

        width_at_edge = kappa(edge)
        z = solve_increasing(objective, target, step=max(width_at_edge, tol), tol=tol * 1e-2,
                             label=f"covering segment {n}")
        center = sign * z
        half = float(kappa(center))
        if half < 1e-12 * (1.0 + abs(center)):
            partial = Covering(direction, float(x), tuple(segments), truncated=True)
            raise CoveringStalled(f"segment {n} collapsed at x={center:.6g}", partial)
        if abs(center) + half > x_limit:
            truncated = True
            logging.warning(f"Covering truncated after {n - 1} segments at the domain limit")
            break
        segments.append((center, half))
        edge = center + sign * half
    logging.debug(f"Covering {direction} from {x}: {len(segments)} segments")
    return Covering(direction, float(x), tuple(segments), truncated)


def covering_identity_deviation(sys, covering):
    """
    Max over n of |integral from the anchor to the inner edge of segment n of
    dt / (r rho) - (n - 1)| / n, for a covering built with kappa = s.
    """
    worst = 0.0
    for n, edge in enumerate(covering.inner_edges(), start=1):
        lo, hi = sorted((covering.anchor, float(edge)))
        mass = sys.window_integral(lo, hi)
        worst = max(worst, abs(mass - (n - 1)) / n)
    return worst
