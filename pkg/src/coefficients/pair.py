"""
The coefficient pair (r, q) of -(r y')' + q y = f, its families and the JSON loader.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.coefficients.densities import (
    BumpDensity, ConstantDensity, PowerDensity, SumDensity, TabulatedDensity
)
from src.utils.constants import TRUNCATION_X_MAX
from src.utils.errors import ProblemFormatError


@dataclass(frozen=True)
class PowerLaw:
    """r = (1 + x^2)^alpha, q = (1 + x^2)^(-beta)."""
    alpha: float
    beta: float
    name: str = field(default='power_law', init=False)


@dataclass(frozen=True)
class Constant:
    r0: float
    q0: float
    name: str = field(default='constant', init=False)


@dataclass(frozen=True)
class Tabulated:
    """Linear interpolation of 1/r and q between nodes, power tails beyond."""
    nodes: int
    r_exponent: float = None
    q_exponent: float = None
    name: str = field(default='tabulated', init=False)


@dataclass(frozen=True)
class Composite:
    description: str = ''
    name: str = field(default='composite', init=False)


@dataclass(frozen=True)
class Truncation:
    """Numerical domain: cutoff X_max and the tail descriptions of r and q."""
    x_max: float = TRUNCATION_X_MAX
    r_tail: str = ''
    q_tail: str = ''


@dataclass(frozen=True)
class CoefficientPair:
    """
    The data (r, q) held as the densities 1/r and q.

    Attributes:
        inv_r: Density of 1/r
        q: Density of the potential
        family: PowerLaw, Constant, Tabulated or Composite tag
        truncation: Numerical domain descriptor
        label: Short human-readable name
    """
    inv_r: object
    q: object
    family: object
    truncation: Truncation = Truncation()
    label: str = ''

    def __post_init__(self):
        probe = np.concatenate(([0.0], np.geomspace(1e-3, 1e3, 61)))
        probe = np.concatenate((-probe[::-1], probe))
        for density in (self.inv_r, self.q):
            if isinstance(density, TabulatedDensity) and density.tail_exponent is None:
                probe = np.linspace(density.xs[0], density.xs[-1], 121)
        inv_r = self.inv_r(probe)
        q = self.q(probe)
        if np.any(~np.isfinite(inv_r)) or np.any(inv_r <= 0.0):
            raise ProblemFormatError(f"{self.label or 'pair'}: r must be finite and positive")
        if np.any(~np.isfinite(q)) or np.any(q < 0.0):
            raise ProblemFormatError(f"{self.label or 'pair'}: q must be finite and nonnegative")

    def r(self, x):
        return 1.0 / self.inv_r(x)

    @property
    def q_is_zero(self):
        return self.q.is_zero

    def model_pair(self):
        """The model equation (r z')' = 0: same r, q identically zero."""
        return CoefficientPair(
            inv_r=self.inv_r,
            q=ConstantDensity(0.0),
            family=Composite('model of ' + (self.label or self.family.name)),
            truncation=self.truncation,
            label=f"model({self.label})",
        )

    def describe(self):
        out = {'family': self.family.name, 'label': self.label}
        if isinstance(self.family, PowerLaw):
            out.update(alpha=self.family.alpha, beta=self.family.beta)
        elif isinstance(self.family, Constant):
            out.update(r0=self.family.r0, q0=self.family.q0)
        elif isinstance(self.family, Composite):
            out.update(description=self.family.description)
        return out


def power_law(alpha, beta):
    """PowerLaw pair; both exponents must exceed 1/2."""
    if not (alpha > 0.5 and beta > 0.5):
        raise ProblemFormatError(f"power_law needs alpha > 1/2 and beta > 1/2, got {alpha}, {beta}")
    return CoefficientPair(
        inv_r=PowerDensity(alpha),
        q=PowerDensity(beta),
        family=PowerLaw(float(alpha), float(beta)),
        truncation=Truncation(r_tail=f"|x|^{2 * alpha}", q_tail=f"|x|^{-2 * beta}"),
        label=f"power_law(alpha={alpha}, beta={beta})",
    )


def model_power_law(alpha):
    """The model equation ((1 + x^2)^alpha z')' = 0."""
    if not alpha > 0.5:
        raise ProblemFormatError(f"model power law needs alpha > 1/2, got {alpha}")
    return CoefficientPair(
        inv_r=PowerDensity(alpha),
        q=ConstantDensity(0.0),
        family=Composite(f"model power law alpha={alpha}"),
        truncation=Truncation(r_tail=f"|x|^{2 * alpha}", q_tail='0'),
        label=f"model(alpha={alpha})",
    )


def constant(r0, q0):
    if not (r0 > 0.0 and q0 >= 0.0):
        raise ProblemFormatError(f"constant pair needs r0 > 0 and q0 >= 0, got {r0}, {q0}")
    return CoefficientPair(
        inv_r=ConstantDensity(1.0 / r0),
        q=ConstantDensity(q0),
        family=Constant(float(r0), float(q0)),
        label=f"constant(r0={r0}, q0={q0})",
    )


def tabulated(points, r_exponent=None, q_exponent=None):
    """
    Pair from (x, r, q) samples.

    Args:
        points: Sequence of [x, r, q] rows with strictly increasing x
        r_exponent: r ~ |x|^r_exponent beyond the table
        q_exponent: q ~ |x|^q_exponent beyond the table
    """
    table = np.asarray(points, dtype=float)
    if table.ndim != 2 or table.shape[1] != 3:
        raise ProblemFormatError("tabulated points must be [x, r, q] triples")
    if np.any(table[:, 1] <= 0.0):
        raise ProblemFormatError("tabulated r must be positive")
    inv_exp = None if r_exponent is None else -float(r_exponent)
    return CoefficientPair(
        inv_r=TabulatedDensity(table[:, 0], 1.0 / table[:, 1], inv_exp),
        q=TabulatedDensity(table[:, 0], table[:, 2], q_exponent),
        family=Tabulated(len(table), r_exponent, q_exponent),
        truncation=Truncation(
            r_tail='' if r_exponent is None else f"|x|^{r_exponent}",
            q_tail='' if q_exponent is None else f"|x|^{q_exponent}",
        ),
        label=f"tabulated({len(table)} nodes)",
    )


def _q_component(spec):
    kind = spec.get('kind')
    if kind == 'constant':
        return ConstantDensity(spec['value'])
    if kind == 'zero':
        return ConstantDensity(0.0)
    if kind == 'power':
        return PowerDensity(spec['beta'], spec.get('scale', 1.0))
    if kind == 'bump':
        return BumpDensity(spec['height'], spec.get('center', 0.0), spec.get('width', 1.0))
    raise ProblemFormatError(f"unknown q component kind: {kind!r}")


def _inv_r_component(spec):
    kind = spec.get('kind')
    if kind == 'constant':
        return ConstantDensity(1.0 / spec['value'])
    if kind == 'power':
        return PowerDensity(spec['alpha'], 1.0 / spec.get('scale', 1.0))
    raise ProblemFormatError(f"unknown r kind: {kind!r}")


def composite(r_spec, q_specs, description=''):
    """
    Pair assembled from an r shape and a sum of q components.

    r kinds: constant {value}, power {alpha, scale}. q kinds: constant {value},
    zero, power {beta, scale}, bump {height, center, width}.
    """
    q_parts = [_q_component(s) for s in q_specs] or [ConstantDensity(0.0)]
    q = q_parts[0] if len(q_parts) == 1 else SumDensity(q_parts)
    return CoefficientPair(
        inv_r=_inv_r_component(r_spec),
        q=q,
        family=Composite(description),
        label=description or 'composite',
    )


def pair_from_dict(doc):
    """Build a pair from a parsed problem document."""
    try:
        family = doc['family']
        if family == 'power_law':
            return power_law(float(doc['alpha']), float(doc['beta']))
        if family == 'constant':
            return constant(float(doc['r0']), float(doc['q0']))
        if family == 'tabulated':
            tail = doc.get('tail', {})
            return tabulated(doc['points'], tail.get('r_exponent'), tail.get('q_exponent'))
        if family == 'composite':
            return composite(doc['r'], doc.get('q', []), doc.get('description', ''))
    except (KeyError, TypeError, ValueError) as e:
        raise ProblemFormatError(f"malformed problem document: {e}") from e
    raise ProblemFormatError(f"unknown family: {family!r}")


def load_problem(path):
    """
    Load a coefficient pair from a JSON problem file.

    Raises:
        ProblemFormatError: File missing, not JSON, or not a valid pair
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError as e:
        raise ProblemFormatError(f"problem file not found: {path}") from e
    except (OSError, json.JSONDecodeError) as e:
        raise ProblemFormatError(f"cannot read problem file {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ProblemFormatError("problem file must hold a JSON object")
    pair = pair_from_dict(doc)
    logging.info(f"Loaded problem {pair.label} from {path}")
    return pair
