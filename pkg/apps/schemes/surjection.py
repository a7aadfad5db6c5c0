"""
Second aggregation stage r: types -> Y.

Fixed families (identity, threshold, majority, All-1), the exhaustive
threshold search, the greedy symbol-merging heuristic and the gradient of V
for probabilistic binary surjections.
"""
import logging

import numpy as np
from scipy import stats
from scipy.special import rel_entr

from .exceptions import SchemeError
from .infometrics import binary_entropy, build_distributions, verification_V
from .models import GradientReport, ProbabilisticSurjection, SourceModel, Surjection
from .source_model import build_type_model

logger = logging.getLogger(__name__)

# Two candidates whose V differ by less than this are considered tied.
TIE_TOLERANCE = 1e-12


def identity_surjection(type_count):
    """Y = T."""
    if type_count < 1:
        raise SchemeError(f"type_count must be >= 1, got {type_count}")
    return Surjection(np.arange(type_count), name='identity')


def threshold_surjection(n, t_threshold):
    """
    Binary output: 1 iff at least ``t_threshold`` of the n enrolled bits are 1.
    """
    if not 1 <= t_threshold <= n:
        raise SchemeError(f"threshold must lie in [1, {n}], got {t_threshold}")
    table = (np.arange(n + 1) >= t_threshold).astype(np.int64)
    return Surjection(table, name=f'threshold:{t_threshold}')


def all_one_surjection(n):
    """Y = 1 iff any enrolled bit is 1 (Bloom-filter enrollment)."""
    return Surjection(threshold_surjection(n, 1).table, name='all1')


def majority_surjection(n):
    """Y = 1 iff more than half of the enrolled bits are 1."""
    return Surjection(threshold_surjection(n, n // 2 + 1).table, name='majority')


def best_threshold(p, n, chan):
    """
    Threshold surjection maximising V for a binary source.

    Every t in 1..n is evaluated exactly; ties go to the smallest t.

    Returns:
        tuple: (t*, V*)
    """
    tm = build_type_model(SourceModel(2, p), n)
    best_t, best_v = None, -np.inf

    for t in range(1, n + 1):
        v = verification_V(build_distributions(tm, threshold_surjection(n, t), chan))
        if v > best_v + TIE_TOLERANCE:
            best_t, best_v = t, v

    logger.debug(f"Best threshold for p={p:.6g}, n={n}: t={best_t}, V={best_v:.6g}")
    return best_t, best_v


def _merged_verification(dist, a, b):
    """V after merging output symbols a and b (a < b)."""
    p1 = np.delete(dist.p1, b, axis=1)
    p1[:, a] += dist.p1[:, b]
    py = np.delete(dist.py, b)
    py[a] += dist.py[b]
    return float(rel_entr(p1, np.outer(dist.pq, py)).sum())


def greedy_merge(tm, r, chan, target_size):
    """
    Coarsen ``r`` by repeatedly merging the pair of output symbols that loses
    the least V, until |Y| = target_size.

    Ties (within 1e-12) go to the lexicographically smallest pair.

    Args:
        tm: TypeModel
        r: starting Surjection (usually the identity)
        chan: NoiseChannel
        target_size: final number of output symbols (>= 2)

    Returns:
        Surjection: r composed with every merge
    """
    if target_size < 2:
        raise SchemeError(f"target_size must be >= 2, got {target_size}")
    if target_size > r.output_symbols:
        raise SchemeError(f"cannot merge {r.output_symbols} symbols up to {target_size}")

    current = r
    dist = build_distributions(tm, current, chan)

    while current.output_symbols > target_size:
        k = current.output_symbols
        best_pair, best_v = None, -np.inf

        for a in range(k - 1):
            for b in range(a + 1, k):
                v = _merged_verification(dist, a, b)
                if v > best_v + TIE_TOLERANCE:
                    best_pair, best_v = (a, b), v

        a, b = best_pair
        # Symbol b joins a; symbols above b shift down by one
        mapping = np.arange(k)
        mapping[b] = a
        mapping[b + 1:] -= 1
        current = current.compose(mapping, name=f'greedy:{k - 1}')
        dist = build_distributions(tm, current, chan)
        logger.info(f"Greedy merge {k} -> {k - 1} symbols: merged ({a}, {b}), V={best_v:.6g}")

    return current


def greedy_chain(tm, chan, targets, start=None):
    """
    Nested greedy surjections for several target sizes along one merge path.

    Returns:
        dict: target size -> Surjection
    """
    current = start or identity_surjection(tm.type_count)
    chain = {}
    for target in sorted(set(targets), reverse=True):
        current = greedy_merge(tm, current, chan, target)
        chain[target] = current
    return chain


def _check_theta(n, theta):
    if not isinstance(theta, ProbabilisticSurjection):
        theta = ProbabilisticSurjection(np.asarray(theta, dtype=float))
    if theta.group_size != n:
        raise SchemeError(f"theta must have n+1 = {n + 1} entries, got {theta.theta.size}")
    return theta.theta


def _boundary_value(value, entries):
    """Exact 0 or 1 when every theta entry feeding ``value`` sits on that bound."""
    if np.all(entries == 0.0):
        return 0.0
    if np.all(entries == 1.0):
        return 1.0
    return float(np.clip(value, 0.0, 1.0))


def _output_probabilities(p, n, theta):
    """P(Y=1), P(Y=1|X=0), P(Y=1|X=1) for a probabilistic binary surjection."""
    t = np.arange(n + 1)
    py1 = _boundary_value(stats.binom.pmf(t, n, p) @ theta, theta)
    py1_given0 = _boundary_value(stats.binom.pmf(t, n - 1, p) @ theta, theta[:n])
    py1_given1 = _boundary_value(stats.binom.pmf(t - 1, n - 1, p) @ theta, theta[1:])
    return py1, py1_given0, py1_given1


def probabilistic_verification(p, n, theta):
    """
    V = I(X1; Y) for the noiseless channel and P(r(t)=1) = theta[t].
    """
    theta = _check_theta(n, theta)
    py1, py1_given0, py1_given1 = _output_probabilities(p, n, theta)
    return (
        binary_entropy(py1)
        - (1.0 - p) * binary_entropy(py1_given0)
        - p * binary_entropy(py1_given1)
    )


def _h_prime(x):
    """h'(x) = log((1-x)/x); +inf at 0, -inf at 1."""
    with np.errstate(divide='ignore'):
        return float(np.log1p(-x) - np.log(x))


def _weighted(weight, value):
    """weight * value, with 0 wherever the weight is 0 (value may be infinite)."""
    with np.errstate(invalid='ignore'):
        return np.where(weight > 0.0, weight * value, 0.0)


def surjection_gradient(p, n, theta):
    """
    Gradient of V w.r.t. theta, noiseless binary setting.

    dV/dtheta_t = P(T=t) [h'(P(Y=1)) - (n-t)/n h'(P(Y=1|X=0)) - t/n h'(P(Y=1|X=1))]
                = n^-1 K1 (t - n K2), with
        K1 = P(T=t) delta,
        K2 = (h'(P(Y=1|X=0)) - h'(P(Y=1))) / delta,
        delta = h'(P(Y=1|X=0)) - h'(P(Y=1|X=1)).

    A term whose weight is 0 is dropped before its h' is used. When P(Y=1|X=x)
    sits at 0 or 1 but P(Y=1) does not, the remaining terms give signed
    infinities and the report is flagged ``diverged``. A constant theta puts
    all three probabilities on the same bound; the log-divergences then
    cancel and each h' is replaced by the log of the rate at which its
    argument leaves the bound, giving the finite one-sided derivative.

    Returns:
        GradientReport
    """
    theta = _check_theta(n, theta)
    py1, py1_given0, py1_given1 = _output_probabilities(p, n, theta)

    t = np.arange(n + 1)
    pt = stats.binom.pmf(t, n, p)
    weight0, weight1 = (n - t) / n, t / n

    if py1 in (0.0, 1.0):
        # h'(x) ~ -log(x) near 0 and log(1-x) near 1
        sign = -1.0 if py1 == 0.0 else 1.0
        with np.errstate(divide='ignore'):
            h_py1 = sign * np.log(pt)
            h_given0 = sign * np.log(stats.binom.pmf(t, n - 1, p))
            h_given1 = sign * np.log(stats.binom.pmf(t - 1, n - 1, p))
    else:
        h_py1, h_given0, h_given1 = (np.full(n + 1, _h_prime(v)) for v in (py1, py1_given0, py1_given1))

    gradient = pt * (h_py1 - _weighted(weight0, h_given0) - _weighted(weight1, h_given1))
    diverged = not np.all(np.isfinite(gradient))

    with np.errstate(invalid='ignore', divide='ignore'):
        delta = _h_prime(py1_given0) - _h_prime(py1_given1)
        shift = _h_prime(py1_given0) - _h_prime(py1)
        k2 = shift / delta if np.isfinite(delta) and delta != 0.0 else np.nan
        k1 = pt * delta

    if diverged:
        logger.debug(f"Gradient diverges at p={p}, n={n}: P(Y=1)={py1}, P(Y=1|X)=({py1_given0}, {py1_given1})")
    return GradientReport(gradient=gradient, k1=k1, k2=float(k2), delta=float(delta), diverged=diverged)
