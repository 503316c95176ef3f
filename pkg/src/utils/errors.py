"""
Exception types raised by the sl-solvability package.

Mathematical outcomes (a diverging supremum, an undetermined trend) are values,
not exceptions. The classes below signal that a requested quantity could not be
produced at all.
"""


class SolvabilityError(Exception):
    """Base class for every domain error of the package."""


class ProblemFormatError(SolvabilityError):
    """A coefficient specification is malformed or violates r > 0, q >= 0."""


class NonIntegrableTail(SolvabilityError):
    """A finite value was requested for an improper integral that diverges."""


class ModelRequiresIntegrableInvR(SolvabilityError):
    """The explicit model system needs 1/r integrable over the whole line."""


class PfssUnavailable(SolvabilityError):
    """No construction branch applies to the coefficient pair."""


class MatchingFailed(SolvabilityError):
    """A numerically integrated principal solution lost positivity."""


class BracketingFailed(SolvabilityError):
    """A monotone objective never reached its target inside the numerical domain."""

    def __init__(self, message, bracket=None, last_value=None):
        super().__init__(message)
        self.bracket = bracket
        self.last_value = last_value


class RegimeError(SolvabilityError):
    """The operation is only defined under the limit condition on (r, q)."""


class CoveringStalled(SolvabilityError):
    """Segment widths collapsed before the requested number of segments."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NonConvergentRow(SolvabilityError):
    """A Green-kernel row integral failed to converge."""


class ReductionUnavailable(SolvabilityError):
    """The pair cannot be reduced to the q = 0 model equation."""
