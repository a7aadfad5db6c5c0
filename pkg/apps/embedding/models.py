"""
Domain types of the random-projection embedding.
"""
from dataclasses import dataclass, field

import numpy as np

from apps.schemes.exceptions import SchemeError

# |v| = 1 check for inputs of embed()
UNIT_NORM_TOLERANCE = 1e-6

# Construction accuracy of sample_pair()
PAIR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EmbeddingConfig:
    """
    Quantizer x -> (1[U_i . x > lambda])_{i < m}.

    The m projection directions U_i are i.i.d. standard normal d-vectors drawn
    from a counter-based stream keyed by ``seed``.
    """
    dim: int
    seq_length: int
    lambda_x: float = 0.0
    lambda_q: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise SchemeError(f"dim must be >= 2, got {self.dim}")
        if self.seq_length < 1:
            raise SchemeError(f"seq_length must be >= 1, got {self.seq_length}")
        if not 0 <= self.seed < 2 ** 64:
            raise SchemeError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True, eq=False)
class CorrelatedPair:
    """Unit enrolled template and unit query with x . q = correlation."""
    enrolled: np.ndarray
    query: np.ndarray
    correlation: float

    def __post_init__(self):
        for name in ('enrolled', 'query'):
            vector = np.array(getattr(self, name), dtype=float)
            vector.flags.writeable = False
            object.__setattr__(self, name, vector)

        if self.enrolled.shape != self.query.shape or self.enrolled.ndim != 1:
            raise SchemeError("enrolled and query must be vectors of the same dimension")
        if abs(np.linalg.norm(self.enrolled) - 1.0) > PAIR_TOLERANCE:
            raise SchemeError("enrolled template is not unit-norm")
        if abs(np.linalg.norm(self.query) - 1.0) > PAIR_TOLERANCE:
            raise SchemeError("query is not unit-norm")
        if abs(float(self.enrolled @ self.query) - self.correlation) > PAIR_TOLERANCE:
            raise SchemeError("pair correlation does not match")

    @property
    def dim(self):
        return self.enrolled.size


@dataclass(frozen=True)
class GridSearchResult:
    """Best (lambda_x, lambda_q) of one surjection family at correlation c."""
    correlation: float
    family: str
    lambda_x: float
    lambda_q: float
    verification: float
    activation_prob: float
    eta0: float
    eta1: float
    threshold: int = None
    evaluated: int = field(default=0, compare=False)

    def as_row(self):
        return {
            'c': self.correlation,
            'family': self.family,
            'lambda_x': self.lambda_x,
            'lambda_q': self.lambda_q,
            'p': self.activation_prob,
            'eta0': self.eta0,
            'eta1': self.eta1,
            'threshold': '' if self.threshold is None else self.threshold,
            'verification': self.verification,
        }
