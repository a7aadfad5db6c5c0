from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class EquivalenceReport:
    """
    Lengths a Bloom filter and the sparse All-1 scheme need for the same
    false-positive target.

    Both lengths come from m >= -n log(epsilon) / (log 2)^2. The filter gets
    there with k = floor(log(2) m / n) hashes per item; the scheme with
    Binomial(m, log(2)/n) active symbols per enrolled sequence.
    """
    n: int
    epsilon: float
    bloom_bound: float
    scheme_bound: float
    bloom_m: int
    scheme_m: int
    hash_count: int
    activation_prob: float
    bloom_false_positive_rate: float
    exact_scheme_m: int = None
    degenerate: bool = False

    @property
    def bounds_equal(self):
        return abs(self.bloom_bound - self.scheme_bound) <= 1e-9 * max(1.0, self.bloom_bound)

    def as_dict(self):
        return {**asdict(self), 'bounds_equal': self.bounds_equal}
