"""
Integrals of 1/r and q over the line and the regime classification of a pair.
"""
import logging
import math
from dataclasses import dataclass

from src.utils.constants import QUAD_TOL_FINITE, QUAD_TOL_IMPROPER, CLASSIFY_PROBE_X
from src.utils.errors import NonIntegrableTail, ProblemFormatError
from src.utils.trend import expanding_grid

REGIME_INTEGRABLE = 'integrable'   # 1/r and q both integrable over the line
REGIME_LIMIT = 'limit'             # the limit condition on window integrals holds
REGIME_MODEL = 'model'             # q identically zero, 1/r integrable
REGIME_OTHER = 'other'

WINDOW_DECAY_RATIO = 0.95


def ternary(flag):
    """Render True/False/None as 'true'/'false'/'undetermined'."""
    if flag is None:
        return 'undetermined'
    return 'true' if flag else 'false'


@dataclass(frozen=True)
class IntegrabilityProfile:
    """Integrability flags of a pair; None stands for undetermined."""
    inv_r_L1: object
    q_L1: object
    condition_1_3: object
    condition_2_20: object
    condition_2_5: object
    w0: float
    regime: str

    def to_dict(self):
        return {
            'inv_r_L1': ternary(self.inv_r_L1),
            'q_L1': ternary(self.q_L1),
            'condition_1_3': ternary(self.condition_1_3),
            'condition_2_20': ternary(self.condition_2_20),
            'condition_2_5': ternary(self.condition_2_5),
            'w0': self.w0,
            'regime': self.regime,
        }


def _default_tol(a, b, tol):
    if tol is not None:
        return tol
    return QUAD_TOL_FINITE if math.isfinite(a) and math.isfinite(b) else QUAD_TOL_IMPROPER


def integrate_inv_r(pair, a, b, tol=None):
    """
    Integral of dt / r(t) over [a, b]; either endpoint may be infinite.

    Raises:
        ValueError: a > b
        NonIntegrableTail: an improper range whose integral diverges
    """
    if a > b:
        raise ValueError(f"integrate_inv_r needs a <= b, got a={a}, b={b}")
    return pair.inv_r.integral(a, b, _default_tol(a, b, tol))


def integrate_q(pair, a, b, tol=None):
    """Integral of q over [a, b]; see integrate_inv_r."""
    if a > b:
        raise ValueError(f"integrate_q needs a <= b, got a={a}, b={b}")
    return pair.q.integral(a, b, _default_tol(a, b, tol))


def _window_probe(density, x_probe, tol):
    """Compare window masses [X, 2X] and [2X, 4X] on both sides."""
    flags = []
    for sign in (1.0, -1.0):
        lo, hi = sorted((sign * x_probe, sign * 2.0 * x_probe))
        first = density.integral(lo, hi, tol)
        lo, hi = sorted((sign * 2.0 * x_probe, sign * 4.0 * x_probe))
        second = density.integral(lo, hi, tol)
        if first == 0.0 and second == 0.0:
            flags.append(True)
            continue
        ratio = second / first if first > 0.0 else math.inf
        logging.debug(f"window ratio on side {sign:+.0f}: {ratio:.4g}")
        if ratio < WINDOW_DECAY_RATIO:
            flags.append(True)
        elif ratio >= 1.0:
            flags.append(False)
        else:
            flags.append(None)
    if False in flags:
        return False
    if None in flags:
        return None
    return True


def _integrability(density, tol):
    flag = density.integrability()
    if flag is None:
        try:
            flag = _window_probe(density, CLASSIFY_PROBE_X, tol)
        except ProblemFormatError:
            logging.warning(f"{density!r}: no tail metadata, integrability undetermined")
    return flag


def _tail_positive(tail_fn, x):
    try:
        return bool(tail_fn(x) > 0.0)
    except NonIntegrableTail:
        return True
    except ProblemFormatError:
        return None


def _tail_infinite(tail_fn):
    try:
        tail_fn(0.0)
    except NonIntegrableTail:
        return True
    except ProblemFormatError:
        return None
    return False


def _both(a, b):
    if a is False or b is False:
        return False
    if a is None or b is None:
        return None
    return True


def _either(a, b):
    if a is True or b is True:
        return True
    if a is None or b is None:
        return None
    return False


def _q_tail_positive(pair, sign, x_max):
    """
    Positive q mass beyond every sampled x on one side, out to x_max.

    The tail mass is monotone in x, so the first vanishing point decides.
    """
    tail_fn = pair.q.upper_tail if sign > 0 else pair.q.lower_tail
    flag = True
    for x in expanding_grid(x_limit=x_max, one_sided=1):
        positive = _tail_positive(tail_fn, sign * float(x))
        if positive is False:
            logging.debug(f"q vanishes beyond {sign * x:.4g}")
            return False
        if positive is None:
            flag = None
    return flag


def _limit_condition_side(pair, sign, q_positive):
    """
    Window masses of 1/r and q over [x, x + d] tend to their tails as d grows; the
    product diverges exactly when q keeps positive mass and one tail is infinite.
    """
    if sign > 0:
        infinite = _either(_tail_infinite(pair.inv_r.upper_tail), _tail_infinite(pair.q.upper_tail))
    else:
        infinite = _either(_tail_infinite(pair.inv_r.lower_tail), _tail_infinite(pair.q.lower_tail))
    return _both(q_positive, infinite)


def classify(pair, tol=QUAD_TOL_FINITE):
    """
    Classify the pair: integrability of 1/r and q, the limit condition on
    window integrals, tail positivity of q and the resulting regime.

    Returns:
        IntegrabilityProfile
    """
    inv_r_L1 = _integrability(pair.inv_r, tol)
    q_L1 = True if pair.q_is_zero else _integrability(pair.q, tol)

    w0 = math.inf
    if inv_r_L1:
        w0 = pair.inv_r.total()

    if pair.q_is_zero:
        condition_1_3 = condition_2_20 = condition_2_5 = False
    else:
        x_far = pair.truncation.x_max
        q_right = _q_tail_positive(pair, 1.0, x_far)
        q_left = _q_tail_positive(pair, -1.0, x_far)
        condition_2_20 = _both(q_right, q_left)
        condition_1_3 = _both(_limit_condition_side(pair, 1.0, q_right),
                              _limit_condition_side(pair, -1.0, q_left))
        condition_2_5 = (_tail_positive(pair.q.upper_tail, 0.0)
                         and _tail_positive(pair.q.lower_tail, 0.0))

    if pair.q_is_zero and inv_r_L1:
        regime = REGIME_MODEL
    elif inv_r_L1 and q_L1:
        regime = REGIME_INTEGRABLE
    elif condition_1_3:
        regime = REGIME_LIMIT
    else:
        regime = REGIME_OTHER

    profile = IntegrabilityProfile(inv_r_L1, q_L1, condition_1_3, condition_2_20,
                                   condition_2_5, w0, regime)
    logging.info(f"Classified {pair.label}: regime={regime}, w0={w0:.6g}")
    return profile
