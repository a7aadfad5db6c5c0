"""
Classic Bloom filter and its reading as an All-1 aggregation scheme.

Inserting an item sets k bits; enrolling n items is the same as aggregating
n sparse binary sequences (one per item, k ones each) with the All-1
surjection. The two structures only differ in how the ones are drawn: a
fixed k per item for the filter, Binomial(m, p) per sequence for the scheme.
"""
import logging
import math

import mmh3
import numpy as np

from apps.membership.membership import enroll
from apps.schemes.channel import noiseless_channel
from apps.schemes.exceptions import SchemeError
from apps.schemes.infometrics import build_distributions, required_length, round_up_length, verification_V
from apps.schemes.models import SourceModel
from apps.schemes.source_model import build_type_model
from apps.schemes.surjection import all_one_surjection

from .models import EquivalenceReport

logger = logging.getLogger(__name__)

LOG2 = math.log(2.0)
SEED_MASK = (1 << 64) - 1


def optimal_k(m, n):
    """Hash count minimising the false-positive rate: floor(log(2) m / n), at least 1."""
    if m < 1 or n < 1:
        raise SchemeError(f"m and n must be >= 1, got m={m}, n={n}")
    return max(1, math.floor(LOG2 * m / n))


def expected_false_positive_rate(m, n, k):
    """(1 - exp(-k n / m))^k."""
    return (1.0 - math.exp(-k * n / m)) ** k


def _as_bytes(item):
    if isinstance(item, str):
        return item.encode('utf-8')
    return bytes(item)


class BloomFilter:
    """
    Bit array of length m with k double-hashed positions per item.

    Positions are h1 + j h2 mod m for j < k, where (h1, h2) are the two 64-bit
    halves of the seeded 128-bit MurmurHash3 of the item. ``contains`` only
    reads the bits; ``insert`` needs exclusive access.
    """

    def __init__(self, size, hash_count, seed=0):
        if size < 1:
            raise SchemeError(f"filter size must be >= 1, got {size}")
        if hash_count < 1:
            raise SchemeError(f"hash_count must be >= 1, got {hash_count}")
        if not 0 <= seed <= SEED_MASK:
            raise SchemeError(f"seed must be a 64-bit unsigned integer, got {seed}")

        self.size = int(size)
        self.hash_count = int(hash_count)
        self.seed = int(seed)
        self.bits = np.zeros(self.size, dtype=np.uint8)
        self.inserted = 0

    def __repr__(self):
        return f'BloomFilter(size={self.size}, hash_count={self.hash_count}, inserted={self.inserted})'

    @classmethod
    def from_items(cls, items, size, hash_count=None, seed=0):
        """Filter holding ``items``; k defaults to ``optimal_k(size, len(items))``."""
        items = list(items)
        if hash_count is None:
            hash_count = optimal_k(size, max(1, len(items)))
        bloom = cls(size, hash_count, seed)
        for item in items:
            bloom.insert(item)
        return bloom

    def _murmur_seed(self):
        # mmh3 takes a 32-bit seed; fold the high word in
        return (self.seed ^ (self.seed >> 32)) & 0xFFFFFFFF

    def positions(self, item):
        """The k bit positions of ``item`` (repeats possible)."""
        h1, h2 = mmh3.hash64(_as_bytes(item), seed=self._murmur_seed(), signed=False)
        return np.array([(h1 + j * h2) % self.size for j in range(self.hash_count)], dtype=np.int64)

    def insert(self, item):
        self.bits[self.positions(item)] = 1
        self.inserted += 1

    def contains(self, item):
        return bool(self.bits[self.positions(item)].all())

    __contains__ = contains

    def item_sequence(self, item):
        """Binary sequence of length m with ones at the item's positions."""
        sequence = np.zeros(self.size, dtype=np.int64)
        sequence[self.positions(item)] = 1
        return sequence

    def false_positive_rate(self, probes):
        """Fraction of ``probes`` reported present."""
        probes = list(probes)
        if not probes:
            raise SchemeError("no probe items")
        return sum(self.contains(probe) for probe in probes) / len(probes)

    def expected_false_positive_rate(self):
        return expected_false_positive_rate(self.size, max(1, self.inserted), self.hash_count)


def all_one_enrollment(items, size, hash_count, seed=0):
    """
    Enroll ``items`` as n binary sequences aggregated with the All-1 surjection.

    The resulting representation is bit-identical to
    ``BloomFilter.from_items(items, size, hash_count, seed).bits``.

    Returns:
        GroupRepresentation
    """
    items = list(items)
    if not items:
        raise SchemeError("cannot enroll an empty group")
    probe = BloomFilter(size, hash_count, seed)
    sequences = np.stack([probe.item_sequence(item) for item in items])
    return enroll(sequences, all_one_surjection(len(items)))


def equivalence_report(n, epsilon):
    """
    Filter length and All-1 scheme length reaching false-positive rate epsilon.

    Both follow m >= -n log(epsilon) / (log 2)^2: the filter at its optimal k,
    the scheme at p = log(2)/n where V ~ (log 2)^2 / n. ``exact_scheme_m``
    uses the exact V of the All-1 scheme at that p (when p <= 1/2).
    epsilon = 1 needs no bits and is flagged as degenerate.

    Returns:
        EquivalenceReport
    """
    if n < 1:
        raise SchemeError(f"n must be >= 1, got {n}")
    if not 0.0 < epsilon <= 1.0:
        raise SchemeError(f"epsilon must lie in (0, 1], got {epsilon}")

    activation_prob = LOG2 / n
    if epsilon == 1.0:
        return EquivalenceReport(
            n=n, epsilon=epsilon, bloom_bound=0.0, scheme_bound=0.0, bloom_m=0, scheme_m=0,
            hash_count=0, activation_prob=activation_prob, bloom_false_positive_rate=1.0, degenerate=True,
        )

    bloom_bound = -n * math.log(epsilon) / LOG2 ** 2
    scheme_verification = LOG2 ** 2 / n
    scheme_bound = -math.log(epsilon) / scheme_verification

    bloom_m = max(1, round_up_length(bloom_bound))
    hash_count = optimal_k(bloom_m, n)

    exact_scheme_m = None
    if activation_prob <= 0.5:
        tm = build_type_model(SourceModel(2, activation_prob), n)
        exact = verification_V(build_distributions(tm, all_one_surjection(n), noiseless_channel()))
        exact_scheme_m = required_length(exact, epsilon)

    report = EquivalenceReport(
        n=n,
        epsilon=epsilon,
        bloom_bound=bloom_bound,
        scheme_bound=scheme_bound,
        bloom_m=bloom_m,
        scheme_m=max(1, required_length(scheme_verification, epsilon)),
        hash_count=hash_count,
        activation_prob=activation_prob,
        bloom_false_positive_rate=expected_false_positive_rate(bloom_m, n, hash_count),
        exact_scheme_m=exact_scheme_m,
    )
    logger.info(f"Equivalence n={n}, epsilon={epsilon}: filter m={report.bloom_m}, scheme m={report.scheme_m}")
    return report
