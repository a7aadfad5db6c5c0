"""
Figures of merit of an aggregation scheme, in nats.

- compactness C = H(Y)
- security S = H(X|Y)
- verification V = I(Y;Q), the bound on the false-positive error exponent

All quantities are computed exactly from the joint laws P1(q, y) and
P0(q, y) = P(Q=q) P(Y=y), with the 0 log 0 = 0 convention.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize, stats
from scipy.special import entr, gammaln, rel_entr

from .channel import binary_channel, query_marginal
from .exceptions import SchemeError, UnverifiableScheme
from .models import Metrics, SchemeDistributions, SourceModel, Surjection
from .source_model import build_type_model, source_entropy, symbol_pmf

logger = logging.getLogger(__name__)

# Terms kept in the Poisson compactness series; the remainder decays like
# alpha^j log(j!) / j!, below 1e-40 for alpha <= 5 at j = 50.
POISSON_TERMS = 50

# Relative slack when rounding a length bound up to an integer.
LENGTH_ROUNDING_TOLERANCE = 1e-9


def binary_entropy(p):
    """h(p) = -p log p - (1-p) log(1-p), in nats."""
    if not 0.0 <= p <= 1.0:
        raise SchemeError(f"p must lie in [0, 1], got {p}")
    return float(entr(p) + entr(1.0 - p))


def entropy(pmf):
    """Shannon entropy of a probability vector (any shape), in nats."""
    return float(entr(np.asarray(pmf, dtype=float)).sum())


def build_distributions(tm, r, chan):
    """
    Joint laws of (Q, Y) under both hypotheses.

    P(X1=x, Y=y) is the type joint law pushed through r; P1 composes it with
    the channel, P0 is the product of the marginals.

    Args:
        tm: TypeModel
        r: Surjection over tm's type space
        chan: NoiseChannel over tm's alphabet

    Returns:
        SchemeDistributions
    """
    if r.type_count != tm.type_count:
        raise SchemeError(f"surjection covers {r.type_count} types, type model has {tm.type_count}")
    if chan.alphabet_size != tm.alphabet_size:
        raise SchemeError(
            f"channel alphabet ({chan.alphabet_size}) differs from source alphabet ({tm.alphabet_size})"
        )

    pxy = tm.joint_xt @ r.indicator()
    py = pxy.sum(axis=0)
    p1 = chan.transition.T @ pxy
    pq = query_marginal(tm.source, chan)
    p0 = np.outer(pq, py)
    return SchemeDistributions(py=py, pq=pq, p1=p1, p0=p0, pxy=pxy)


def verification_V(dist):
    """
    V = sum_{q,y} P1 log(P1/P0).

    Raises:
        SchemeError: if some cell has P1 > 0 while P0 = 0
    """
    if np.any((dist.p1 > 0.0) & (dist.p0 <= 0.0)):
        raise SchemeError("inconsistent scheme: P1(q, y) > 0 where P0(q, y) = 0")
    return max(float(rel_entr(dist.p1, dist.p0).sum()), 0.0)


def compactness_C(dist):
    """C = H(Y)."""
    return entropy(dist.py)


def security_S(dist, model):
    """
    S = H(X|Y) = H(X) - I(X;Y), from P(X1=x, Y=y).
    """
    px = symbol_pmf(model)
    if dist.pxy.shape[0] != px.size:
        raise SchemeError("pxy rows do not match the source alphabet")
    mutual = float(rel_entr(dist.pxy, np.outer(px, dist.py)).sum())
    return max(source_entropy(model) - mutual, 0.0)


def evaluate(tm, r, chan):
    """All figures of merit of one scheme."""
    dist = build_distributions(tm, r, chan)
    return Metrics(
        compactness=compactness_C(dist),
        security=security_S(dist, tm.source),
        verification=verification_V(dist),
        source_entropy=source_entropy(tm.source),
    )


def round_up_length(value):
    """ceil(value), treating values within rounding noise of an integer as that integer."""
    nearest = round(value)
    if abs(value - nearest) <= LENGTH_ROUNDING_TOLERANCE * max(1.0, abs(value)):
        return int(nearest)
    return math.ceil(value)


def required_length(V, epsilon):
    """
    Smallest m with m >= -log(epsilon) / V.

    Raises:
        UnverifiableScheme: if V <= 0
    """
    if not 0.0 < epsilon < 1.0:
        raise SchemeError(f"epsilon must lie in (0, 1), got {epsilon}")
    if V <= 0.0:
        raise UnverifiableScheme(f"V = {V} nats: no length achieves P_fp < {epsilon}")
    return round_up_length(-math.log(epsilon) / V)


class AsymptoticSetup(str, Enum):
    DENSE_TYPE = 'dense_type'
    SPARSE_TYPE = 'sparse_type'
    DENSE_MAJORITY = 'dense_majority'
    SPARSE_ALL1 = 'sparse_all1'


@dataclass(frozen=True)
class AsymptoticConstant:
    """V ~ kappa / n for large n when p follows ``p_rule``."""
    setup: AsymptoticSetup
    p_rule: str
    alpha: float
    kappa: float

    def activation_prob(self, n):
        """p prescribed for group size n."""
        return 0.5 if self.alpha is None else self.alpha / n


_ASYMPTOTICS = {
    AsymptoticSetup.DENSE_TYPE: AsymptoticConstant(AsymptoticSetup.DENSE_TYPE, 'p = 1/2', None, 0.5),
    AsymptoticSetup.SPARSE_TYPE: AsymptoticConstant(AsymptoticSetup.SPARSE_TYPE, 'p = 1.338/n', 1.338, 0.580),
    AsymptoticSetup.DENSE_MAJORITY: AsymptoticConstant(
        AsymptoticSetup.DENSE_MAJORITY, 'p = 1/2', None, 1.0 / math.pi
    ),
    AsymptoticSetup.SPARSE_ALL1: AsymptoticConstant(
        AsymptoticSetup.SPARSE_ALL1, 'p = log(2)/n', math.log(2), math.log(2) ** 2
    ),
}


def asymptotic_kappa(setup):
    """Large-n constants (p rule, kappa) of the four reference setups."""
    return _ASYMPTOTICS[AsymptoticSetup(setup)]


def noiseless_binary_verification(p, n):
    """Closed form V = h(p) - sum_t P(T=t) h(t/n) for Y = T, noiseless."""
    t = np.arange(n + 1)
    ratio = t / n
    conditional = entr(ratio) + entr(1.0 - ratio)
    return binary_entropy(p) - float(stats.binom.pmf(t, n, p) @ conditional)


def gaussian_compactness(n):
    """Dense-setup approximation of H(T): (1/2) log(pi e n / 2)."""
    return 0.5 * math.log(math.pi * math.e * n / 2.0)


def poisson_compactness(alpha, terms=POISSON_TERMS):
    """
    Sparse-setup approximation of H(T) with T ~ Poisson(alpha):

        alpha (1 - log alpha) + e^-alpha sum_j alpha^j log(j!) / j!

    The series is cut after ``terms``; the first dropped term bounds the
    remainder once j > alpha.
    """
    j = np.arange(terms + 1)
    log_fact = gammaln(j + 1)
    series = np.exp(j * math.log(alpha) - log_fact - alpha) @ log_fact
    return alpha * (1.0 - math.log(alpha)) + float(series)


def sparse_security_approximation(alpha, n):
    """H(X) ~ (alpha/n)(1 - log(alpha/n)) for p = alpha/n."""
    p = alpha / n
    return p * (1.0 - math.log(p))


def optimal_activation(n, surjection=None, chan=None, bounds=None):
    """
    Maximise V over the activation probability of a binary source.

    The surjection table does not depend on p, so it is held fixed while p
    varies. Defaults: identity surjection, noiseless channel, p in (1e-6/n, 1/2].

    Returns:
        (p*, V*)
    """
    surjection = surjection or Surjection(np.arange(n + 1), name='identity')
    chan = chan or binary_channel(0.0, 0.0)
    low, high = bounds or (1e-6 / n, 0.5)

    def _negative_v(p):
        tm = build_type_model(SourceModel(2, float(p)), n)
        return -verification_V(build_distributions(tm, surjection, chan))

    result = optimize.minimize_scalar(
        _negative_v, bounds=(low, high), method='bounded', options={'xatol': 1e-10}
    )
    logger.debug(f"Optimal activation for n={n}, {surjection.name}: p={result.x:.6g}, V={-result.fun:.6g}")
    return float(result.x), float(-result.fun)


@dataclass(frozen=True)
class SensitivityPoint:
    eta0: float
    verification: float
    slope: float


def noise_sensitivity(tm, r, eta0_grid, eta1=0.0):
    """
    V along a grid of eta0 values with finite-difference slopes dV/deta0.

    The step is max(eta0/10, 1e-9): forward differences at eta0 = 0, where
    the derivative may diverge, central differences elsewhere.

    Returns:
        list of SensitivityPoint
    """
    if tm.alphabet_size != 2:
        raise SchemeError("noise sensitivity is defined for binary schemes")

    def _v(eta0):
        return verification_V(build_distributions(tm, r, binary_channel(eta0, eta1)))

    points = []
    for eta0 in eta0_grid:
        eta0 = float(eta0)
        step = max(eta0 / 10.0, 1e-9)
        value = _v(eta0)
        if eta0 == 0.0:
            slope = (_v(step) - value) / step
        elif eta0 + step > 1.0:
            slope = (value - _v(eta0 - step)) / step
        else:
            slope = (_v(eta0 + step) - _v(eta0 - step)) / (2.0 * step)
        points.append(SensitivityPoint(eta0=eta0, verification=value, slope=slope))
    return points


def metric_row(tm, r, chan, label=None):
    """One CSV-ready row (n, p, |Y|, eta0, eta1, C, S, V)."""
    metrics = evaluate(tm, r, chan)
    return {
        'n': tm.group_size,
        'p': tm.source.activation_prob,
        'surjection': label or r.name,
        'output_symbols': r.output_symbols,
        'eta0': chan.eta0,
        'eta1': chan.eta1,
        **metrics.as_dict(),
        'n_times_v': tm.group_size * metrics.verification,
    }
