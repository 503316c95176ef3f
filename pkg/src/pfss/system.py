"""
The principal fundamental system {u, v} of (r z')' = q z and its generating function.
"""
import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.utils.constants import X0_TOL
from src.utils.errors import BracketingFailed
from src.utils.numerics import bisect_monotone

METHOD_EXPLICIT_MODEL = 'ExplicitModel'
METHOD_CONSTANT = 'ConstantClosedForm'
METHOD_MATCHING = 'AsymptoticMatching'
METHOD_RICCATI = 'RiccatiSweep'


@dataclass(frozen=True)
class PrincipalSystem:
    """
    A constructed PFSS.

    All callables are vectorised over numpy arrays.

    Attributes:
        u: Principal solution at +infinity, positive and nonincreasing
        v: Principal solution at -infinity, positive and nondecreasing
        rho: Generating function u * v
        log_ratio: ln(v / u); its increments are the integrals of dt / (r rho)
        flux_u: r * u'
        flux_v: r * v'
        x0: Crossing point u(x0) = v(x0)
        method: Construction tag
        pair: The coefficient pair the system solves
        domain: |x| bound inside which the system is trusted
        quality: Verification residuals; construction notes such as a capped matching cutoff
        provenance: Construction details (cutoffs, scales)
    """
    u: object
    v: object
    rho: object
    log_ratio: object
    flux_u: object
    flux_v: object
    x0: float
    method: str
    pair: object
    domain: float = math.inf
    quality: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def window_integral(self, a, b):
        """Integral of dt / (r rho) over [a, b]."""
        return float(self.log_ratio(b) - self.log_ratio(a))

    def rescaled(self, a):
        """
        The system (a u, v / a).

        rho is kept as the same object; the crossing point moves to where
        ln(v / u) = 2 ln a.
        """
        if not a > 0.0:
            raise ValueError(f"rescaling factor must be positive, got {a}")
        shift = 2.0 * math.log(a)
        u, v, fu, fv, lr = self.u, self.v, self.flux_u, self.flux_v, self.log_ratio

        def log_ratio(x):
            return lr(x) - shift

        return dataclasses.replace(
            self,
            u=lambda x: a * u(x),
            v=lambda x: v(x) / a,
            flux_u=lambda x: a * fu(x),
            flux_v=lambda x: fv(x) / a,
            log_ratio=log_ratio,
            x0=locate_crossing(log_ratio, self.domain),
            provenance={**self.provenance, 'rescaled_by': a},
        )

    def with_quality(self, record):
        return dataclasses.replace(self, quality={**self.quality, **record})

    def describe(self):
        return {
            'method': self.method,
            'x0': self.x0,
            'domain': self.domain,
            'provenance': dict(self.provenance),
            'quality': dict(self.quality),
        }


def locate_crossing(log_ratio, domain=math.inf, tol=X0_TOL):
    """
    Find x0 with ln(v/u)(x0) = 0 by bracket doubling and bisection.

    ln(v/u) is strictly increasing for any PFSS.
    """
    def f(x):
        return float(log_ratio(np.asarray(x, dtype=float)))

    lo, hi = -1.0, 1.0
    while f(lo) > 0.0:
        lo *= 2.0
        if -lo > domain or lo < -1e300:
            raise BracketingFailed("ln(v/u) stays positive to the left", (lo, hi), f(lo))
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > domain or hi > 1e300:
            raise BracketingFailed("ln(v/u) stays negative to the right", (lo, hi), f(hi))
    x0 = bisect_monotone(f, lo, hi, tol)
    logging.debug(f"crossing point x0={x0:.12g}")
    return x0
