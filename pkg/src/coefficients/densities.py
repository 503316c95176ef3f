"""
Nonnegative densities on the real line with exact or adaptive integrals.

A density is what the pipeline integrates: 1/r and q. Each density evaluates
vectorised, integrates over any (possibly improper) interval and knows whether
its integral over the line is finite.
"""
import math

import numpy as np
from scipy.special import beta as beta_fn, betainc

from src.utils.constants import QUAD_TOL_FINITE, QUAD_TOL_IMPROPER
from src.utils.errors import NonIntegrableTail, ProblemFormatError
from src.utils.numerics import adaptive_quad


class Density:
    """Base class; subclasses override the exact pieces they can provide."""

    even = False
    is_zero = False
    breakpoints = ()

    def __call__(self, x):
        raise NotImplementedError

    def integrability(self):
        """True, False or None (unknown) for finiteness of the integral over the line."""
        return None

    def upper_tail(self, x):
        """Integral from x to +infinity."""
        value, _, ok = adaptive_quad(self._scalar, float(x), math.inf, QUAD_TOL_IMPROPER,
                                     self.breakpoints)
        if not ok or not math.isfinite(value):
            raise NonIntegrableTail(f"{self!r}: integral over [{x}, inf) does not converge")
        return value

    def lower_tail(self, x):
        """Integral from -infinity to x."""
        if self.even:
            return self.upper_tail(-x)
        value, _, ok = adaptive_quad(self._scalar, -math.inf, float(x), QUAD_TOL_IMPROPER,
                                     self.breakpoints)
        if not ok or not math.isfinite(value):
            raise NonIntegrableTail(f"{self!r}: integral over (-inf, {x}] does not converge")
        return value

    def total(self):
        return self.lower_tail(0.0) + self.upper_tail(0.0)

    def integral(self, a, b, tol=QUAD_TOL_FINITE):
        """Integral over [a, b] with a <= b; infinite endpoints allowed."""
        if a == b:
            return 0.0
        if math.isinf(a) and math.isinf(b):
            return self.total()
        if math.isinf(b):
            return self.upper_tail(a)
        if math.isinf(a):
            return self.lower_tail(b)
        value, _, ok = adaptive_quad(self._scalar, a, b, tol, self.breakpoints)
        if not ok:
            raise NonIntegrableTail(f"{self!r}: quadrature over [{a}, {b}] did not converge")
        return value

    def _scalar(self, t):
        return float(self(np.asarray(t, dtype=float)))


class PowerDensity(Density):
    """scale * (1 + x^2)^(-gamma); tails in closed form through the incomplete beta function."""

    even = True

    def __init__(self, gamma, scale=1.0):
        self.gamma = float(gamma)
        self.scale = float(scale)

    def __repr__(self):
        return f"PowerDensity(gamma={self.gamma}, scale={self.scale})"

    def __call__(self, x):
        return self.scale * (1.0 + np.square(x)) ** (-self.gamma)

    def integrability(self):
        return self.gamma > 0.5

    def total(self):
        if self.gamma <= 0.5:
            return math.inf
        return self.scale * beta_fn(self.gamma - 0.5, 0.5)

    def _right_tail(self, x):
        # valid for x >= 0
        a = self.gamma - 0.5
        return 0.5 * self.scale * beta_fn(a, 0.5) * betainc(a, 0.5, 1.0 / (1.0 + np.square(x)))

    def upper_tail(self, x):
        if self.gamma <= 0.5:
            raise NonIntegrableTail(f"{self!r}: tail integral diverges")
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0.0, self._right_tail(np.abs(x)), self.total() - self._right_tail(np.abs(x)))
        return out if out.ndim else float(out)

    def lower_tail(self, x):
        return self.upper_tail(-np.asarray(x, dtype=float))

    def integral(self, a, b, tol=QUAD_TOL_FINITE):
        if a == b:
            return 0.0
        if self.gamma <= 0.5:
            if math.isinf(a) or math.isinf(b):
                raise NonIntegrableTail(f"{self!r}: tail integral diverges")
            return super().integral(a, b, tol)
        if a >= 0.0:
            return float(self.upper_tail(a) - self.upper_tail(b))
        if b <= 0.0:
            return float(self.lower_tail(b) - self.lower_tail(a))
        return float(self.total() - self.upper_tail(b) - self.lower_tail(a))


class ConstantDensity(Density):
    """A constant c >= 0."""

    even = True

    def __init__(self, value):
        self.value = float(value)
        self.is_zero = self.value == 0.0

    def __repr__(self):
        return f"ConstantDensity({self.value})"

    def __call__(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.value)

    def integrability(self):
        return self.is_zero

    def upper_tail(self, x):
        if self.is_zero:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        raise NonIntegrableTail(f"{self!r}: tail integral diverges")

    def lower_tail(self, x):
        return self.upper_tail(x)

    def total(self):
        return 0.0 if self.is_zero else math.inf

    def integral(self, a, b, tol=QUAD_TOL_FINITE):
        if a == b or self.is_zero:
            return 0.0
        if math.isinf(a) or math.isinf(b):
            raise NonIntegrableTail(f"{self!r}: tail integral diverges")
        return self.value * (b - a)


class BumpDensity(Density):
    """Compactly supported bump height * (1 - z^2)^2 with z = (x - center) / width."""

    def __init__(self, height, center, width):
        if width <= 0.0 or height < 0.0:
            raise ProblemFormatError("bump needs width > 0 and height >= 0")
        self.height = float(height)
        self.center = float(center)
        self.width = float(width)
        self.breakpoints = (self.center - self.width, self.center + self.width)

    def __repr__(self):
        return f"BumpDensity(height={self.height}, center={self.center}, width={self.width})"

    def __call__(self, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.height * np.where(np.abs(z) < 1.0, (1.0 - z * z) ** 2, 0.0)

    def _primitive(self, x):
        z = np.clip((np.asarray(x, dtype=float) - self.center) / self.width, -1.0, 1.0)
        inner = self.height * self.width * (z - 2.0 * z ** 3 / 3.0 + z ** 5 / 5.0 + 8.0 / 15.0)
        # exact values outside the support
        return np.where(z <= -1.0, 0.0, np.where(z >= 1.0, self.total(), inner))

    def integrability(self):
        return True

    def total(self):
        return self.height * self.width * 16.0 / 15.0

    def upper_tail(self, x):
        out = self.total() - self._primitive(x)
        return out if np.ndim(out) else float(out)

    def lower_tail(self, x):
        out = self._primitive(x)
        return out if np.ndim(out) else float(out)

    def integral(self, a, b, tol=QUAD_TOL_FINITE):
        if a == b:
            return 0.0
        return float(self._primitive(b) - self._primitive(a))


class SumDensity(Density):
    """Sum of component densities."""

    def __init__(self, components):
        self.components = tuple(components)
        if not self.components:
            raise ProblemFormatError("a composite density needs at least one component")
        self.even = all(c.even for c in self.components)
        self.is_zero = all(c.is_zero for c in self.components)
        self.breakpoints = tuple(sorted(p for c in self.components for p in c.breakpoints))

    def __repr__(self):
        return f"SumDensity({list(self.components)!r})"

    def __call__(self, x):
        return sum(c(x) for c in self.components)

    def integrability(self):
        flags = [c.integrability() for c in self.components if not c.is_zero]
        if any(f is False for f in flags):
            return False
        if all(f is True for f in flags):
            return True
        return None

    def upper_tail(self, x):
        return sum(c.upper_tail(x) for c in self.components if not c.is_zero)

    def lower_tail(self, x):
        return sum(c.lower_tail(x) for c in self.components if not c.is_zero)

    def total(self):
        return sum(c.total() for c in self.components)

    def integral(self, a, b, tol=QUAD_TOL_FINITE):
        live = [c for c in self.components if not c.is_zero]
        return sum(c.integral(a, b, tol / max(len(live), 1)) for c in live)


class TabulatedDensity(Density):
    """
    Piecewise-linear density through tabulated nodes with power-law tails.

    Beyond the table the density continues as y_end * (x / x_end)^exponent on each
    side. Without an exponent, evaluation outside the table is refused.
    """

    def __init__(self, xs, ys, tail_exponent=None):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or len(xs) < 2 or np.any(np.diff(xs) <= 0.0):
            raise ProblemFormatError("tabulated nodes must be strictly increasing, at least two")
        if tail_exponent is not None and (xs[0] >= 0.0 or xs[-1] <= 0.0):
            raise ProblemFormatError("power tails need a table straddling x = 0")
        self.xs, self.ys = xs, ys
        self.tail_exponent = None if tail_exponent is None else float(tail_exponent)
        self.breakpoints = tuple(xs)
        gaps = np.diff(xs)
        self._cumulative = np.concatenate(([0.0], np.cumsum(0.5 * gaps * (ys[1:] + ys[:-1]))))

    def __repr__(self):
        return f"TabulatedDensity(nodes={len(self.xs)}, tail_exponent={self.tail_exponent})"

    def _check_range(self, x):
        if self.tail_exponent is None and (np.any(x < self.xs[0]) or np.any(x > self.xs[-1])):
            raise ProblemFormatError(
                "tabulated coefficient evaluated outside its table without tail metadata"
            )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        self._check_range(x[np.isfinite(x)] if x.ndim else x)
        inside = np.interp(x, self.xs, self.ys)
        if self.tail_exponent is None:
            return inside
        e = self.tail_exponent
        with np.errstate(divide='ignore', invalid='ignore'):
            right = self.ys[-1] * (np.abs(x) / self.xs[-1]) ** e
            left = self.ys[0] * (np.abs(x) / abs(self.xs[0])) ** e
        return np.where(x > self.xs[-1], right, np.where(x < self.xs[0], left, inside))

    def integrability(self):
        if self.tail_exponent is None:
            return None
        return self.tail_exponent < -1.0

    def _table_primitive(self, x):
        x = np.clip(np.asarray(x, dtype=float), self.xs[0], self.xs[-1])
        i = np.clip(np.searchsorted(self.xs, x, side='right') - 1, 0, len(self.xs) - 2)
        dx = x - self.xs[i]
        slope = (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
        return self._cumulative[i] + self.ys[i] * dx + 0.5 * slope * dx * dx

    def _power_piece(self, y_end, x_end, a, b):
        # integral of y_end * (t / x_end)^e over [a, b] on the side where t / x_end > 0
        e = self.tail_exponent
        if e == -1.0:
            return y_end * x_end * math.log(b / a)
        return y_end * x_end / (e + 1.0) * ((b / x_end) ** (e + 1.0) - (a / x_end) ** (e + 1.0))

    def _right_piece(self, a, b):
        a = max(a, self.xs[-1])
        if b <= a:
            return 0.0
        if math.isinf(b):
            if self.tail_exponent >= -1.0:
                raise NonIntegrableTail(f"{self!r}: right tail diverges")
            return -self.ys[-1] * self.xs[-1] / (self.tail_exponent + 1.0) * (a / self.xs[-1]) ** (self.tail_exponent + 1.0)
        return self._power_piece(self.ys[-1], self.xs[-1], a, b)

    def _left_piece(self, a, b):
        b = min(b, self.xs[0])
        if b <= a:
            return 0.0
        # mirror to the positive side
        return self._mirror_right(-b, -a)

    def _mirror_right(self, a, b):
        x_end = abs(self.xs[0])
        if math.isinf(b):
            if self.tail_exponent >= -1.0:
                raise NonIntegrableTail(f"{self!r}: left tail diverges")
            return -self.ys[0] * x_end / (self.tail_exponent + 1.0) * (a / x_end) ** (self.tail_exponent + 1.0)
        return self._power_piece(self.ys[0], x_end, a, b)

    def integral(self, a, b, tol=QUAD_TOL_FINITE):
        if a == b:
            return 0.0
        self._check_range(np.array([a, b]))
        table = float(self._table_primitive(min(max(b, self.xs[0]), self.xs[-1]))
                      - self._table_primitive(max(min(a, self.xs[-1]), self.xs[0])))
        if self.tail_exponent is None:
            return table
        return table + self._left_piece(a, b) + self._right_piece(a, b)

    def upper_tail(self, x):
        if np.ndim(x):
            return np.array([self.integral(float(t), math.inf) for t in np.ravel(x)]).reshape(np.shape(x))
        return self.integral(float(x), math.inf)

    def lower_tail(self, x):
        if np.ndim(x):
            return np.array([self.integral(-math.inf, float(t)) for t in np.ravel(x)]).reshape(np.shape(x))
        return self.integral(-math.inf, float(x))

    def total(self):
        return self.integral(-math.inf, math.inf)
