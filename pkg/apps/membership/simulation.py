"""
Monte-Carlo evaluation: pooled verification runs and the empirical
false-positive exponent.
"""
import logging

import numpy as np
from celery import group

from .exceptions import SimulationError
from .membership import build_scheme, pfn_at_pfp
from .models import HARD_REJECT, ExponentPoint, ExponentReport, VerificationOutcome
from .serializers import VerificationConfigSerializer
from .tasks import simulate_run

logger = logging.getLogger(__name__)

# Recall (1 - P_fn) at which the exponent threshold is set
EXPONENT_RECALL = 0.95


def validate_config(config):
    """
    Validate a run config.

    Raises:
        SimulationError: with the serializer errors
    """
    serializer = VerificationConfigSerializer(data=dict(config))
    if not serializer.is_valid():
        raise SimulationError(f"invalid verification config: {serializer.errors}")
    return dict(serializer.validated_data)


def run_verification(config):
    """
    Run ``runs`` independent Monte-Carlo runs and pool their scores.

    Every run is a ``simulate_run`` task seeded by (seed, run index); results
    are pooled in run order, so the outcome does not depend on scheduling.

    Returns:
        VerificationOutcome
    """
    config = validate_config(config)
    scheme = build_scheme(config)
    logger.info(
        f"Verification: mode={config['mode']}, n={config['n']}, m={config['m']}, "
        f"{scheme.surjection.name}, runs={config['runs']}, V={scheme.verification:.6g}"
    )

    job = group(simulate_run.s(config, run_index) for run_index in range(config['runs']))
    results = sorted(job.apply_async().get(), key=lambda result: result['run_index'])

    positive = np.concatenate([np.asarray(result['positive'], dtype=float) for result in results])
    negative = np.concatenate([np.asarray(result['negative'], dtype=float) for result in results])
    pfn, tau, achieved, gamma = pfn_at_pfp(positive, negative, config['operating_pfp'])

    logger.info(f"P_fn={pfn:.4g} at P_fp={config['operating_pfp']} (tau={tau:.4g})")
    return VerificationOutcome(
        positive_scores=positive,
        negative_scores=negative,
        pfn_at_pfp=pfn,
        threshold_tau=tau,
        operating_pfp=config['operating_pfp'],
        achieved_pfp=achieved,
        tie_weight=gamma,
        runs=config['runs'],
        verification=scheme.verification,
        config=config,
    )


def weighted_false_positive_rate(positive_scores, tau):
    """
    P0(S >= tau) estimated from H1 scores: E1[exp(-S) 1{S >= tau}].

    Unbiased because S is the exact log-likelihood ratio of the query.
    """
    positive_scores = np.asarray(positive_scores, dtype=float)
    hits = positive_scores[(positive_scores >= tau) & (positive_scores > HARD_REJECT / 2)]
    return float(np.exp(-hits).sum() / positive_scores.size)


def empirical_exponent(config, m_grid, recall=EXPONENT_RECALL):
    """
    Estimate the false-positive exponent -log(P_fp) / m.

    For each m, tau_m keeps a fraction ``recall`` of the positive scores;
    P_fp(tau_m) is estimated both naively from negatives and by reweighting
    positives. The exponent is the slope of -log P_fp against m.

    Returns:
        ExponentReport
    """
    m_grid = [int(m) for m in m_grid]
    if len(m_grid) < 2 or any(a >= b for a, b in zip(m_grid, m_grid[1:])):
        raise SimulationError(f"m_grid must be strictly increasing with at least two points, got {m_grid}")

    points = []
    for m in m_grid:
        outcome = run_verification({**config, 'm': m})
        tau = float(np.quantile(outcome.positive_scores, 1.0 - recall))
        points.append(ExponentPoint(
            m=m,
            naive_pfp=float(np.mean(outcome.negative_scores >= tau)),
            weighted_pfp=weighted_false_positive_rate(outcome.positive_scores, tau),
            threshold=tau,
        ))

    usable = [point for point in points if point.weighted_pfp > 0.0]
    for point in points:
        if point.weighted_pfp <= 0.0:
            logger.warning(f"Excluding m={point.m}: estimated P_fp is 0")
    if len(usable) < 2:
        raise SimulationError("fewer than two lengths with a nonzero P_fp estimate")

    m = np.array([point.m for point in usable], dtype=float)
    neg_log_pfp = -np.log([point.weighted_pfp for point in usable])
    slope, intercept = np.polyfit(m, neg_log_pfp, 1)

    verification = outcome.verification
    logger.info(f"Empirical exponent {slope:.6g} nats/symbol (V={verification:.6g})")
    return ExponentReport(
        points=points, slope=float(slope), intercept=float(intercept), verification=verification, recall=recall,
    )
