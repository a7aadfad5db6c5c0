"""
Domain types of enrollment, scoring and Monte-Carlo evaluation.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from apps.schemes.exceptions import SchemeError
from apps.schemes.infometrics import build_distributions, verification_V
from apps.schemes.models import NoiseChannel, SourceModel, Surjection
from apps.schemes.utils import get_cached_type_model

# Score of a query hitting a cell with P1 = 0. Finite so that scores sort and
# serialize; any number of hits stays far below every attainable score.
HARD_REJECT = -1e300


@dataclass(frozen=True, eq=False)
class Scheme:
    """Source model, group size, surjection and assumed query channel."""
    source: SourceModel
    group_size: int
    surjection: Surjection
    channel: NoiseChannel

    def __post_init__(self):
        if self.channel.alphabet_size != self.source.alphabet_size:
            raise SchemeError("channel and source alphabets differ")

    @cached_property
    def type_model(self):
        return get_cached_type_model(self.source.alphabet_size, self.source.activation_prob, self.group_size)

    @cached_property
    def distributions(self):
        return build_distributions(self.type_model, self.surjection, self.channel)

    @cached_property
    def llr(self):
        """Per-cell log P1(q, y) / P0(q, y); -inf where P1 = 0 < P0."""
        dist = self.distributions
        table = np.zeros_like(dist.p1)
        positive = dist.p1 > 0.0
        table[positive] = np.log(dist.p1[positive] / dist.p0[positive])
        table[~positive & (dist.p0 > 0.0)] = -np.inf
        table.flags.writeable = False
        return table

    @cached_property
    def verification(self):
        return verification_V(self.distributions)

    @property
    def output_symbols(self):
        return self.surjection.output_symbols


@dataclass(frozen=True, eq=False)
class GroupRepresentation:
    """Aggregated sequence Y of one enrolled group."""
    symbols: np.ndarray
    scheme: Scheme = None
    group_id: object = None

    def __post_init__(self):
        symbols = np.array(self.symbols, dtype=np.int64)
        symbols.flags.writeable = False
        object.__setattr__(self, 'symbols', symbols)

        if symbols.ndim != 1:
            raise SchemeError("group representation must be a sequence")
        if self.scheme is not None and symbols.size and (
            symbols.min() < 0 or symbols.max() >= self.scheme.output_symbols
        ):
            raise SchemeError(f"symbols must lie in [0, {self.scheme.output_symbols})")

    @property
    def length(self):
        return self.symbols.size

    def slice(self, start, stop):
        """Representation of the indices [start, stop)."""
        return GroupRepresentation(self.symbols[start:stop], scheme=self.scheme, group_id=self.group_id)


def score_histogram(scores, edges):
    finite = scores[scores > HARD_REJECT / 2]
    counts, _ = np.histogram(finite, bins=edges)
    return {'counts': counts.tolist(), 'hard_rejects': int(scores.size - finite.size)}


@dataclass(frozen=True, eq=False)
class VerificationOutcome:
    """Pooled scores of every run and the operating point they reach."""
    positive_scores: np.ndarray
    negative_scores: np.ndarray
    pfn_at_pfp: float
    threshold_tau: float
    operating_pfp: float = 0.05
    achieved_pfp: float = None
    tie_weight: float = 0.0
    runs: int = 1
    verification: float = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.pfn_at_pfp <= 1.0:
            raise SchemeError(f"pfn_at_pfp must lie in [0, 1], got {self.pfn_at_pfp}")

    def histogram_edges(self, bins):
        pooled = np.concatenate([self.positive_scores, self.negative_scores])
        finite = pooled[pooled > HARD_REJECT / 2]
        low, high = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 0.0)
        if high <= low:
            low, high = low - 0.5, high + 0.5
        return np.linspace(low, high, bins + 1)

    def as_dict(self, bins=256):
        edges = self.histogram_edges(bins)
        return {
            'pfn_at_pfp': self.pfn_at_pfp,
            'operating_pfp': self.operating_pfp,
            'achieved_pfp': self.achieved_pfp,
            'threshold_tau': self.threshold_tau,
            'tie_weight': self.tie_weight,
            'runs': self.runs,
            'positive_count': int(self.positive_scores.size),
            'negative_count': int(self.negative_scores.size),
            'verification': self.verification,
            'histogram': {
                'edges': edges.tolist(),
                'positive': score_histogram(self.positive_scores, edges),
                'negative': score_histogram(self.negative_scores, edges),
            },
        }


@dataclass(frozen=True)
class ExponentPoint:
    m: int
    naive_pfp: float
    weighted_pfp: float
    threshold: float

    @property
    def exponent(self):
        """-log(P_fp) / m from the importance-sampled estimate."""
        if self.weighted_pfp <= 0.0:
            return None
        return -float(np.log(self.weighted_pfp)) / self.m


@dataclass(frozen=True)
class ExponentReport:
    points: list
    slope: float
    intercept: float
    verification: float
    recall: float
