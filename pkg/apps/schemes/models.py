"""
Domain types for group aggregation schemes.

Every type is immutable after construction: dataclasses are frozen and the
numpy arrays they hold are flagged read-only, so instances can be shared
between runs and cached freely.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import SchemeError

# Row-stochastic and normalisation checks. The constructions are exact up to
# floating rounding, so any larger drift is a bug.
PROBABILITY_TOLERANCE = 1e-12


def _frozen(array, dtype=float):
    """Return a read-only copy of ``array``."""
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class SourceModel:
    """
    I.i.d. symbol source over {0, ..., |X|-1}.

    Symbol 0 has probability 1 - p(|X|-1); every other symbol has probability
    p. Small p is the sparse setup, p = 1/|X| the dense (uniform) one.
    """
    alphabet_size: int
    activation_prob: float

    def __post_init__(self):
        if int(self.alphabet_size) != self.alphabet_size or self.alphabet_size < 2:
            raise SchemeError(f"alphabet_size must be an integer >= 2, got {self.alphabet_size}")
        upper = 1.0 / self.alphabet_size
        if not 0.0 < self.activation_prob <= upper + PROBABILITY_TOLERANCE:
            raise SchemeError(
                f"activation_prob must lie in (0, 1/{self.alphabet_size}], got {self.activation_prob}"
            )

    @property
    def zero_prob(self):
        """P(X = 0)."""
        return 1.0 - self.activation_prob * (self.alphabet_size - 1)

    @property
    def is_binary(self):
        return self.alphabet_size == 2


@dataclass(frozen=True, eq=False)
class TypeModel:
    """
    Distribution of the type (histogram) of n enrolled symbols.

    ``types`` holds one count-vector per row in canonical colex order (for a
    binary alphabet: ascending number of ones). ``joint_xt[x, t]`` is
    P(X1 = x, T = t).
    """
    group_size: int
    source: SourceModel
    types: np.ndarray
    pmf: np.ndarray
    joint_xt: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'types', _frozen(self.types, dtype=np.int64))
        object.__setattr__(self, 'pmf', _frozen(self.pmf))
        object.__setattr__(self, 'joint_xt', _frozen(self.joint_xt))

        if self.types.shape != (len(self.pmf), self.source.alphabet_size):
            raise SchemeError(f"types has shape {self.types.shape}, incompatible with pmf/alphabet")
        if self.joint_xt.shape != (self.source.alphabet_size, len(self.pmf)):
            raise SchemeError(f"joint_xt has shape {self.joint_xt.shape}")

    @property
    def type_count(self):
        return len(self.pmf)

    @property
    def alphabet_size(self):
        return self.source.alphabet_size


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    """
    Discrete memoryless channel W(q|x) between an enrolled and a query symbol.

    Symmetric w.r.t. symbol 0: W(s|0) = eta0 and W(0|s) = eta1 for s != 0.
    ``eta2`` is the cross-error rate among nonzero symbols (|X| > 2 only).
    """
    transition: np.ndarray
    eta0: float
    eta1: float
    eta2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, 'transition', _frozen(self.transition))
        w = self.transition

        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 2:
            raise SchemeError(f"transition must be a square matrix of size >= 2, got {w.shape}")
        if np.any(w < -PROBABILITY_TOLERANCE):
            raise SchemeError("transition has negative entries")
        if np.any(np.abs(w.sum(axis=1) - 1.0) > PROBABILITY_TOLERANCE):
            raise SchemeError("transition rows must sum to 1")

    @property
    def alphabet_size(self):
        return self.transition.shape[0]

    @property
    def is_noiseless(self):
        return bool(np.array_equal(self.transition, np.eye(self.alphabet_size)))


@dataclass(frozen=True, eq=False)
class Surjection:
    """
    Map r from type indices onto output symbols {0, ..., |Y|-1}.

    The table is total over the type space and every output symbol has at
    least one preimage.
    """
    table: np.ndarray
    name: str = 'custom'

    def __post_init__(self):
        table = _frozen(self.table, dtype=np.int64)
        object.__setattr__(self, 'table', table)

        if table.ndim != 1 or table.size == 0:
            raise SchemeError("surjection table must be a non-empty vector")
        if table.min() < 0:
            raise SchemeError("surjection symbols must be non-negative")
        if not np.array_equal(np.unique(table), np.arange(table.max() + 1)):
            raise SchemeError("surjection table is not onto {0, ..., |Y|-1}")

    @property
    def type_count(self):
        return self.table.size

    @property
    def output_symbols(self):
        return int(self.table.max()) + 1

    def compose(self, mapping, name=None):
        """
        Return ``mapping o self``: output symbol y becomes ``mapping[y]``.
        """
        mapping = np.asarray(mapping, dtype=np.int64)
        if mapping.shape != (self.output_symbols,):
            raise SchemeError(
                f"mapping must have one entry per output symbol ({self.output_symbols}), got {mapping.shape}"
            )
        return Surjection(mapping[self.table], name=name or self.name)

    def indicator(self):
        """One-hot matrix M[t, y] = [r(t) = y]."""
        m = np.zeros((self.type_count, self.output_symbols))
        m[np.arange(self.type_count), self.table] = 1.0
        return m

    def to_json(self):
        return json.dumps(self.table.tolist())

    @classmethod
    def from_json(cls, payload, name='file'):
        try:
            table = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise SchemeError(f"surjection table is not valid JSON: {exc}") from exc
        if not isinstance(table, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in table):
            raise SchemeError("surjection table must be a JSON array of integers")
        return cls(np.array(table, dtype=np.int64), name=name)


@dataclass(frozen=True, eq=False)
class ProbabilisticSurjection:
    """Binary-output surjection with P(r(t) = 1) = theta[t], t = 0..n."""
    theta: np.ndarray

    def __post_init__(self):
        theta = _frozen(self.theta)
        object.__setattr__(self, 'theta', theta)
        if theta.ndim != 1 or theta.size < 2:
            raise SchemeError("theta must be a vector of length n+1 >= 2")
        if np.any((theta < 0.0) | (theta > 1.0)):
            raise SchemeError("theta entries must lie in [0, 1]")

    @property
    def group_size(self):
        return self.theta.size - 1


@dataclass(frozen=True, eq=False)
class GradientReport:
    """
    Gradient of V w.r.t. theta for the noiseless binary probabilistic surjection.

    dV/dtheta_t = n^-1 * k1[t] * (t - n * k2), with k1[t] = P(T=t) * delta.
    Entries are +/-inf when ``diverged`` is set (an h' argument hit 0 or 1).
    """
    gradient: np.ndarray
    k1: np.ndarray
    k2: float
    delta: float
    diverged: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'gradient', _frozen(self.gradient))
        object.__setattr__(self, 'k1', _frozen(self.k1))


@dataclass(frozen=True, eq=False)
class SchemeDistributions:
    """
    Joint laws feeding the figures of merit.

    p1[q, y] = P(Q=q, Y=y | H1); p0 = outer(pq, py); pxy[x, y] = P(X1=x, Y=y).
    """
    py: np.ndarray
    pq: np.ndarray
    p1: np.ndarray
    p0: np.ndarray
    pxy: np.ndarray

    def __post_init__(self):
        for name in ('py', 'pq', 'p1', 'p0', 'pxy'):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

        if abs(self.p1.sum() - 1.0) > PROBABILITY_TOLERANCE or abs(self.p0.sum() - 1.0) > PROBABILITY_TOLERANCE:
            raise SchemeError("p1 and p0 must each sum to 1")
        if np.any(np.abs(self.p1.sum(axis=1) - self.pq) > PROBABILITY_TOLERANCE):
            raise SchemeError("p1 marginal over y does not match P(Q)")


@dataclass(frozen=True)
class Metrics:
    """Figures of merit in nats."""
    compactness: float
    security: float
    verification: float
    source_entropy: float

    def as_dict(self):
        return {
            'compactness': self.compactness,
            'security': self.security,
            'verification': self.verification,
            'source_entropy': self.source_entropy,
        }
