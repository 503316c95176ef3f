"""
The solvability verdict and its evidence chain.
"""
from dataclasses import dataclass, field

CORRECTLY_SOLVABLE = 'CorrectlySolvable'
NOT_CORRECTLY_SOLVABLE = 'NotCorrectlySolvable'
INCONCLUSIVE = 'Inconclusive'

SOLVABLE = 'solvable'
NOT_SOLVABLE = 'not_solvable'
NEUTRAL = 'neutral'
ERROR = 'error'

# evidence is listed in this order regardless of evaluation order
CRITERION_PRIORITY = (
    'sigma4', 'sigma5', 'D', 'D_direct', 'reduction', 'sigma1', 'sigma2', 'sigma3',
    'nonsolvability', 'B', 'hartman_wintner', 'norm_realization', 'l1_norm', 'construction',
)

SHORT_LABELS = {
    CORRECTLY_SOLVABLE: 'solvable',
    NOT_CORRECTLY_SOLVABLE: 'not',
    INCONCLUSIVE: 'inconclusive',
}


@dataclass(frozen=True)
class Evidence:
    """One criterion outcome with a plain-language basis."""
    criterion: str
    basis: str
    outcome: str
    value: object = None

    def to_dict(self):
        return {
            'criterion': self.criterion,
            'basis': self.basis,
            'outcome': self.outcome,
            'value': self.value,
        }


def order_evidence(evidence):
    rank = {name: i for i, name in enumerate(CRITERION_PRIORITY)}
    return sorted(evidence, key=lambda e: rank.get(e.criterion, len(rank)))


@dataclass(frozen=True)
class SolvabilityReport:
    """
    Outcome of one analysis.

    The criteria D, sigma_1..sigma_5 and B do not depend on p; p only enters
    the norm brackets and probe witnesses.
    """
    verdict: str
    p: float
    regime: dict
    D: object = None
    sigma: object = None
    B: object = None
    hartman_wintner: object = None
    nonsolvability: object = None
    reduction: object = None
    norm_bounds: dict = field(default_factory=dict)
    probe: dict = field(default_factory=dict)
    evidence: tuple = field(default_factory=tuple)
    pair: dict = field(default_factory=dict)

    @property
    def short_label(self):
        return SHORT_LABELS[self.verdict]

    def to_dict(self):
        def maybe(obj):
            return None if obj is None else obj.to_dict()

        out = {
            'verdict': self.verdict,
            'p': self.p,
            'pair': dict(self.pair),
            'regime': dict(self.regime),
            'D': maybe(self.D),
            'B': maybe(self.B),
            'hartman_wintner': maybe(self.hartman_wintner),
            'nonsolvability': maybe(self.nonsolvability),
            'reduction': maybe(self.reduction),
            'norm_bounds': {name: est.to_dict() for name, est in self.norm_bounds.items()},
            'probe': {name: est.to_dict() for name, est in self.probe.items()},
            'evidence': [e.to_dict() for e in self.evidence],
        }
        for i in range(1, 6):
            name = f'sigma{i}'
            out[name] = getattr(self.sigma, name).to_dict() if self.sigma is not None else None
        return out
