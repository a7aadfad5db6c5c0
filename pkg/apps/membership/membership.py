"""
Enrollment, scoring and the per-run Monte-Carlo protocol.

A group of n enrolled sequences is aggregated index-wise: the type of
{X_1(i), ..., X_n(i)} goes through the surjection r to give Y(i). A query is
scored by the log-likelihood ratio sum_i log P1(q_i, y_i) / P0(q_i, y_i).
"""
import logging
import math

import numpy as np

from apps.embedding.embedding import activation_prob, correlated_queries, embed_many, sample_sphere
from apps.embedding.models import EmbeddingConfig
from apps.embedding.utils import get_cached_rates
from apps.schemes.channel import apply_channel, binary_channel, symmetric_channel
from apps.schemes.exceptions import SchemeError
from apps.schemes.models import SourceModel
from apps.schemes.source_model import sample_sequences, type_indices, type_space_size
from apps.schemes.utils import get_cached_type_model, resolve_surjection

from .exceptions import SimulationError
from .models import HARD_REJECT, GroupRepresentation, Scheme

logger = logging.getLogger(__name__)


def enroll(sequences, r, alphabet_size=2, scheme=None, group_id=None):
    """
    Aggregate n enrolled sequences into a group representation.

    Args:
        sequences: n x m matrix of symbols
        r: Surjection over the type space of n symbols
        alphabet_size: |X|
        scheme: Scheme the representation is scored against
        group_id: opaque identifier

    Returns:
        GroupRepresentation
    """
    sequences = np.asarray(sequences)
    if sequences.ndim != 2 or sequences.shape[0] < 1:
        raise SchemeError(f"expected an n x m matrix of enrolled sequences, got shape {sequences.shape}")
    n = sequences.shape[0]
    expected = type_space_size(alphabet_size, n)
    if r.type_count != expected:
        raise SchemeError(f"surjection covers {r.type_count} types, {n} members over |X|={alphabet_size} give {expected}")

    return GroupRepresentation(r.table[type_indices(sequences, alphabet_size)], scheme=scheme, group_id=group_id)


def _cell_scores(scheme):
    return np.where(np.isneginf(scheme.llr), HARD_REJECT, scheme.llr)


def score_many(queries, rep):
    """Scores of every row of a (count, m) query matrix."""
    if rep.scheme is None:
        raise SchemeError("group representation carries no scheme to score against")
    queries = np.atleast_2d(np.asarray(queries, dtype=np.int64))
    if queries.shape[1] != rep.length:
        raise SchemeError(f"query length {queries.shape[1]} differs from representation length {rep.length}")
    table = _cell_scores(rep.scheme)
    if queries.size and (queries.min() < 0 or queries.max() >= table.shape[0]):
        raise SchemeError(f"query symbols must lie in [0, {table.shape[0]})")
    return table[queries, rep.symbols[None, :]].sum(axis=1)


def score(q, rep):
    """
    S = sum_i log P1(q_i, y_i) / P0(q_i, y_i).

    A cell with P1 = 0 contributes HARD_REJECT instead of -inf.
    """
    q = np.asarray(q)
    if q.ndim != 1:
        raise SchemeError("score takes one query sequence")
    return float(score_many(q, rep)[0])


def build_scheme(config):
    """Scheme described by a validated run config."""
    n = config['n']
    if config['mode'] == 'vector':
        lambda_x, lambda_q, c = config['lambda_x'], config['lambda_q'], config['c']
        source = SourceModel(2, activation_prob(lambda_x))
        channel = binary_channel(*get_cached_rates(lambda_x, lambda_q, c))
    else:
        alphabet_size = config['alphabet_size']
        source = SourceModel(alphabet_size, config['p'])
        channel = symmetric_channel(alphabet_size, config['eta0'], config['eta1'], config.get('eta2', 0.0))

    tm = get_cached_type_model(source.alphabet_size, source.activation_prob, n)
    surjection = resolve_surjection(config['surjection'], tm, channel)
    return Scheme(source=source, group_size=n, surjection=surjection, channel=channel)


def run_rng(seed, run_index):
    return np.random.default_rng(np.random.SeedSequence([seed, run_index]))


def projection_seed(seed, run_index):
    return int(np.random.SeedSequence([seed, run_index, 1]).generate_state(1, dtype=np.uint64)[0])


def simulate_scores(config, run_index, keep_templates=False):
    """
    One Monte-Carlo run: enroll ``groups`` groups and score their positive
    and negative queries.

    Positives are noisy versions of enrolled members (through the channel in
    sequence mode, as correlated templates in vector mode). Negatives are fresh
    independent sequences or templates passed through the same path.

    Returns:
        (positive scores, negative scores, enrolled templates or None)
    """
    rng = run_rng(config['seed'], run_index)
    scheme = build_scheme(config)
    n, m = config['n'], config['m']
    positives = config.get('positives_per_group') or n
    negatives = config['negatives_per_group']
    vector_mode = config['mode'] == 'vector'

    if vector_mode:
        cfg = EmbeddingConfig(
            dim=config['d'], seq_length=m, lambda_x=config['lambda_x'], lambda_q=config['lambda_q'],
            seed=projection_seed(config['seed'], run_index),
        )

    pos, neg, kept = [], [], []
    for g in range(config['groups']):
        if vector_mode:
            templates = sample_sphere(n, cfg.dim, rng)
            members = embed_many(templates, cfg, cfg.lambda_x)
            queries = embed_many(correlated_queries(templates[:positives], config['c'], rng), cfg, cfg.lambda_q)
            impostors = embed_many(sample_sphere(negatives, cfg.dim, rng), cfg, cfg.lambda_q)
            if keep_templates:
                kept.append(templates)
        else:
            members = sample_sequences(scheme.source, n, m, rng)
            queries = apply_channel(members[:positives], scheme.channel, rng)
            impostors = apply_channel(sample_sequences(scheme.source, negatives, m, rng), scheme.channel, rng)

        rep = enroll(members, scheme.surjection, scheme.source.alphabet_size, scheme=scheme, group_id=f'{run_index}:{g}')
        pos.append(score_many(queries, rep))
        neg.append(score_many(impostors, rep))

    logger.debug(f"Run {run_index}: {sum(map(len, pos))} positive and {sum(map(len, neg))} negative scores")
    templates = np.concatenate(kept) if kept else None
    return np.concatenate(pos), np.concatenate(neg), templates


def pfn_at_pfp(positive_scores, negative_scores, operating_pfp=0.05):
    """
    False-negative rate of the test S >= tau at the target false-positive rate.

    tau is the (1 - P_fp) quantile of the negative scores, interpolated
    linearly between order statistics. Scores tied with tau are accepted with
    probability gamma so that the negatives hit P_fp exactly.

    Returns:
        (P_fn, tau, achieved P_fp, gamma)

    Raises:
        SimulationError: with fewer than 1/P_fp negative scores
    """
    negative_scores = np.asarray(negative_scores, dtype=float)
    positive_scores = np.asarray(positive_scores, dtype=float)
    if not 0.0 < operating_pfp < 1.0:
        raise SimulationError(f"operating P_fp must lie in (0, 1), got {operating_pfp}")
    needed = math.ceil(1.0 / operating_pfp)
    if negative_scores.size < needed:
        raise SimulationError(
            f"{negative_scores.size} negative scores cannot resolve P_fp={operating_pfp}; need at least {needed}"
        )
    if positive_scores.size == 0:
        raise SimulationError("no positive scores")

    tau = float(np.quantile(negative_scores, 1.0 - operating_pfp))
    above = float(np.mean(negative_scores > tau))
    tied = float(np.mean(negative_scores == tau))
    gamma = float(np.clip((operating_pfp - above) / tied, 0.0, 1.0)) if tied > 0.0 else 0.0

    pfn = float(np.mean(positive_scores < tau) + (1.0 - gamma) * np.mean(positive_scores == tau))
    return pfn, tau, above + gamma * tied, gamma
