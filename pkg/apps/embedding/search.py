"""
Grid search over the quantizer thresholds (lambda_x, lambda_q).

For each candidate pair the induced binary channel is built and the scheme of
the requested surjection family is scored by its exact V.
"""
import logging
from dataclasses import replace

import numpy as np

from apps.schemes.channel import binary_channel
from apps.schemes.exceptions import SchemeError
from apps.schemes.infometrics import build_distributions, verification_V
from apps.schemes.models import SourceModel, Surjection
from apps.schemes.source_model import build_type_model
from apps.schemes.surjection import (
    TIE_TOLERANCE,
    all_one_surjection,
    best_threshold,
    identity_surjection,
    majority_surjection,
)

from .embedding import activation_prob
from .models import GridSearchResult
from .utils import get_cached_rates

logger = logging.getLogger(__name__)

GRID_FAMILIES = ('identity', 'majority', 'all1', 'best')


def default_grid(bound=2.0, step=0.1):
    """All pairs of {-bound, -bound+step, ..., bound}; 41 x 41 by default."""
    if bound < 0 or step <= 0:
        raise SchemeError(f"invalid grid bound={bound}, step={step}")
    values = np.round(np.arange(-bound, bound + step / 2.0, step), 10)
    return [(float(a), float(b)) for a in values for b in values]


def _family_table(family, n):
    if family == 'identity':
        return identity_surjection(n + 1).table
    if family == 'majority':
        return majority_surjection(n).table
    if family == 'all1':
        return all_one_surjection(n).table
    raise SchemeError(f"unknown surjection family '{family}'; expected one of {', '.join(GRID_FAMILIES)}")


def _mirrored(p, n, eta0, eta1):
    """
    Binary sources are stored with p <= 1/2. For p > 1/2 swap the roles of
    0 and 1: (p, eta0, eta1, t) -> (1 - p, eta1, eta0, n - t), which leaves
    every mutual information unchanged.
    """
    if p > 0.5:
        return build_type_model(SourceModel(2, 1.0 - p), n), binary_channel(eta1, eta0), True
    return build_type_model(SourceModel(2, p), n), binary_channel(eta0, eta1), False


def binary_verification(p, n, eta0, eta1, table):
    """Exact V of a binary scheme for any p in (0, 1)."""
    tm, chan, flipped = _mirrored(p, n, eta0, eta1)
    table = np.asarray(table)
    r = Surjection(table[::-1] if flipped else table)
    return verification_V(build_distributions(tm, r, chan))


def _best_threshold_verification(p, n, eta0, eta1):
    """(threshold in the original orientation, V)."""
    tm, chan, flipped = _mirrored(p, n, eta0, eta1)
    t, v = best_threshold(tm.source.activation_prob, n, chan)
    # {t' >= k} in the mirrored tally is {t <= n - k}: the same partition as t >= n - k + 1
    return (n - t + 1 if flipped else t), v


def grid_search(c, n, family, grid=None):
    """
    Find the (lambda_x, lambda_q) maximising V for one surjection family.

    Args:
        c: correlation between enrolled and query templates
        n: group size
        family: identity, majority, all1 or best (best threshold per point)
        grid: iterable of (lambda_x, lambda_q); defaults to default_grid()

    Returns:
        GridSearchResult; ties go to the smaller lambda_x, then smaller lambda_q
    """
    if family not in GRID_FAMILIES:
        raise SchemeError(f"unknown surjection family '{family}'; expected one of {', '.join(GRID_FAMILIES)}")
    candidates = sorted(set(default_grid() if grid is None else ((float(a), float(b)) for a, b in grid)))
    if not candidates:
        raise SchemeError("grid search needs at least one (lambda_x, lambda_q) pair")

    table = None if family == 'best' else _family_table(family, n)
    best = None

    for lambda_x, lambda_q in candidates:
        p = activation_prob(lambda_x)
        if not 0.0 < p < 1.0:
            logger.warning(f"Skipping lambda_x={lambda_x}: activation probability {p} is degenerate")
            continue
        eta0, eta1 = get_cached_rates(lambda_x, lambda_q, c)

        threshold = None
        if family == 'best':
            threshold, v = _best_threshold_verification(p, n, eta0, eta1)
        else:
            v = binary_verification(p, n, eta0, eta1, table)

        if best is None or v > best.verification + TIE_TOLERANCE:
            best = GridSearchResult(
                correlation=c, family=family, lambda_x=lambda_x, lambda_q=lambda_q, verification=v,
                activation_prob=p, eta0=eta0, eta1=eta1, threshold=threshold,
            )

    if best is None:
        raise SchemeError("no grid point yields a valid activation probability")

    logger.info(
        f"Grid optimum c={c}, n={n}, {family}: lambda=({best.lambda_x}, {best.lambda_q}), "
        f"p={best.activation_prob:.4g}, V={best.verification:.6g}"
    )
    return replace(best, evaluated=len(candidates))
