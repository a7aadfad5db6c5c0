"""
Source model of enrolled sequences and the type (histogram) aggregation stage.
"""
import logging
from math import comb

import numpy as np
from django.conf import settings
from scipy import stats
from scipy.special import entr, gammaln, xlogy

from .exceptions import IntractableTypeSpace, SchemeError
from .models import SourceModel, TypeModel

logger = logging.getLogger(__name__)


def symbol_pmf(model):
    """
    Probability of each symbol: 1 - p(|X|-1) for symbol 0, p for the others.

    Returns:
        np.ndarray of length |X|
    """
    pmf = np.full(model.alphabet_size, model.activation_prob)
    pmf[0] = model.zero_prob
    return pmf


def source_entropy(model):
    """H(X) in nats."""
    return float(entr(symbol_pmf(model)).sum())


def type_space_size(alphabet_size, n):
    """Number of types of n symbols over |X| letters: C(n+|X|-1, |X|-1)."""
    return comb(n + alphabet_size - 1, alphabet_size - 1)


def enumerate_types(alphabet_size, n):
    """
    All count-vectors over ``alphabet_size`` symbols summing to ``n``, in
    colexicographic order (last coordinate varies slowest).

    Returns:
        np.ndarray of shape (type_count, alphabet_size)
    """
    def _compositions(parts, total):
        if parts == 1:
            yield (total,)
            return
        for last in range(total + 1):
            for head in _compositions(parts - 1, total - last):
                yield head + (last,)

    return np.array(list(_compositions(alphabet_size, n)), dtype=np.int64)


def _multinomial_pmf(counts, total, probs):
    """Multinomial pmf of each row of ``counts`` (rows summing to ``total``)."""
    counts = np.asarray(counts)
    log_pmf = (
        gammaln(total + 1)
        - gammaln(counts + 1).sum(axis=1)
        + xlogy(counts, probs).sum(axis=1)
    )
    return np.exp(log_pmf)


def binary_joint_xt(p, n):
    """
    Joint law of the first enrolled symbol and the type, binary alphabet.

    Args:
        p: activation probability P(X=1)
        n: group size

    Returns:
        np.ndarray M of shape (2, n+1) with M[x, t] = P(X1 = x, T = t)
    """
    if not 0.0 <= p <= 1.0:
        raise SchemeError(f"p must lie in [0, 1], got {p}")
    if n < 1:
        raise SchemeError(f"group size must be >= 1, got {n}")

    t = np.arange(n + 1)
    # Condition on X1 and let the remaining n-1 draws fill the tally
    joint = np.empty((2, n + 1))
    joint[0] = (1.0 - p) * stats.binom.pmf(t, n - 1, p)
    joint[1] = p * stats.binom.pmf(t - 1, n - 1, p)
    return joint


def build_type_model(model, n, cap=None):
    """
    Enumerate the type space of n i.i.d. draws from ``model``.

    Args:
        model: SourceModel
        n: group size (>= 1)
        cap: maximum number of types (defaults to settings)

    Returns:
        TypeModel

    Raises:
        IntractableTypeSpace: when the type space exceeds ``cap``
    """
    if int(n) != n or n < 1:
        raise SchemeError(f"group size must be an integer >= 1, got {n}")
    n = int(n)
    if cap is None:
        cap = settings.GROUPSKETCH['TYPE_ENUMERATION_CAP']

    alphabet_size = model.alphabet_size
    count = type_space_size(alphabet_size, n)
    if count > cap:
        raise IntractableTypeSpace(alphabet_size, n, count, cap)

    probs = symbol_pmf(model)

    if model.is_binary:
        t = np.arange(n + 1)
        types = np.column_stack([n - t, t])
        pmf = stats.binom.pmf(t, n, model.activation_prob)
        joint = binary_joint_xt(model.activation_prob, n)
    else:
        types = enumerate_types(alphabet_size, n)
        pmf = _multinomial_pmf(types, n, probs)

        joint = np.zeros((alphabet_size, count))
        for x in range(alphabet_size):
            # P(X1 = x) times the law of the other n-1 draws, where present
            has_x = types[:, x] >= 1
            rest = types[has_x].copy()
            rest[:, x] -= 1
            joint[x, has_x] = probs[x] * _multinomial_pmf(rest, n - 1, probs)

    logger.debug(f"Built type model |X|={alphabet_size} n={n} p={model.activation_prob}: {count} types")
    return TypeModel(group_size=n, source=model, types=types, pmf=pmf, joint_xt=joint)


def type_indices(sequences, alphabet_size=2):
    """
    Type index of every column of an n x m matrix of enrolled symbols.

    The index follows the canonical order of ``build_type_model``, so it can be
    fed directly to a surjection table.

    Returns:
        np.ndarray of length m
    """
    sequences = np.asarray(sequences)
    if sequences.ndim != 2:
        raise SchemeError(f"expected an n x m matrix of symbols, got shape {sequences.shape}")
    if sequences.size and (sequences.min() < 0 or sequences.max() >= alphabet_size):
        raise SchemeError(f"symbols must lie in [0, {alphabet_size})")

    n = sequences.shape[0]
    if alphabet_size == 2:
        return sequences.sum(axis=0).astype(np.int64)

    counts = np.stack([(sequences == s).sum(axis=0) for s in range(alphabet_size)], axis=1)
    index = {tuple(row): i for i, row in enumerate(enumerate_types(alphabet_size, n).tolist())}
    return np.array([index[tuple(row)] for row in counts.tolist()], dtype=np.int64)


def sample_sequences(model, count, length, rng):
    """Draw ``count`` i.i.d. sequences of ``length`` symbols."""
    if model.is_binary:
        return (rng.random((count, length)) < model.activation_prob).astype(np.int64)
    return rng.choice(model.alphabet_size, size=(count, length), p=symbol_pmf(model))
