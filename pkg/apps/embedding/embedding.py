"""
Random-projection quantizer from unit templates to binary sequences, and the
channel it induces between an enrolled template and a correlated query.

Bit i of a template v is 1[U_i . v > lambda]. For a template x and a query q
with x . q = c, the pair (U_i . x, U_i . q) is standard bivariate normal with
correlation c, which gives the activation probability and the flip rates in
closed integral form.
"""
import logging
import math

import numpy as np
from scipy import integrate
from scipy.special import ndtr, ndtri

from apps.schemes.channel import binary_channel
from apps.schemes.exceptions import SchemeError

from .models import UNIT_NORM_TOLERANCE, CorrelatedPair

logger = logging.getLogger(__name__)

# Rows of the projection matrix drawn per Philox counter block
PROJECTION_BLOCK = 1024

# phi(a) < 1e-31 beyond |a| = 12, far below the quadrature tolerance
GAUSS_CUTOFF = 12.0

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200


def activation_prob(lambda_x):
    """p = 1 - Phi(lambda_x)."""
    return float(ndtr(-lambda_x))


def activation_threshold(p):
    """Inverse of activation_prob: lambda = Phi^-1(1 - p)."""
    if not 0.0 < p < 1.0:
        raise SchemeError(f"p must lie in (0, 1), got {p}")
    return float(-ndtri(p))


def _check_correlation(c):
    if not -1.0 <= c <= 1.0:
        raise SchemeError(f"correlation must lie in [-1, 1], got {c}")


def _gauss_density(a):
    return math.exp(-0.5 * a * a) / math.sqrt(2.0 * math.pi)


def _below_query_threshold(lambda_q, c):
    """a -> P(U.q <= lambda_q | U.x = a) * phi(a)."""
    spread = math.sqrt(1.0 - c * c)

    def integrand(a):
        return float(ndtr((lambda_q - c * a) / spread)) * _gauss_density(a)

    return integrand


def _integrate(func, low, high, lambda_q, c):
    if low >= high:
        return 0.0
    # The integrand turns over where c a = lambda_q
    points = None
    if c != 0.0 and low < lambda_q / c < high:
        points = [lambda_q / c]
    value, abserr = integrate.quad(
        func, low, high, points=points, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT
    )
    logger.debug(f"quad over [{low:.3g}, {high:.3g}]: {value:.12g} (+/- {abserr:.2g})")
    return value


def induced_eta0(lambda_x, lambda_q, c):
    """
    P(query bit = 1 | enrolled bit = 0):

        1 - 1/Phi(lambda_x) * int_{-inf}^{lambda_x} Phi((lambda_q - c a) / sqrt(1 - c^2)) phi(a) da

    |c| = 1 is evaluated as the deterministic limit q = +/- x.
    """
    _check_correlation(c)
    zero_prob = float(ndtr(lambda_x))
    if zero_prob <= 0.0:
        raise SchemeError(f"lambda_x={lambda_x} leaves no zero bits")

    if c == 1.0:
        return max(0.0, zero_prob - float(ndtr(lambda_q))) / zero_prob
    if c == -1.0:
        return float(ndtr(min(-lambda_q, lambda_x))) / zero_prob

    high = min(lambda_x, GAUSS_CUTOFF)
    stay = _integrate(_below_query_threshold(lambda_q, c), -GAUSS_CUTOFF, high, lambda_q, c)
    return float(np.clip(1.0 - stay / zero_prob, 0.0, 1.0))


def induced_eta1(lambda_x, lambda_q, c):
    """
    P(query bit = 0 | enrolled bit = 1):

        1/p * int_{lambda_x}^{inf} Phi((lambda_q - c a) / sqrt(1 - c^2)) phi(a) da
    """
    _check_correlation(c)
    p = activation_prob(lambda_x)
    if p <= 0.0:
        raise SchemeError(f"lambda_x={lambda_x} leaves no active bits")

    if c == 1.0:
        return max(0.0, float(ndtr(lambda_q)) - float(ndtr(lambda_x))) / p
    if c == -1.0:
        return (1.0 - float(ndtr(max(-lambda_q, lambda_x)))) / p

    low = max(lambda_x, -GAUSS_CUTOFF)
    flipped = _integrate(_below_query_threshold(lambda_q, c), low, GAUSS_CUTOFF, lambda_q, c)
    return float(np.clip(flipped / p, 0.0, 1.0))


def induced_channel(lambda_x, lambda_q, c):
    """Binary NoiseChannel seen through the quantizers (lambda_x, lambda_q)."""
    return binary_channel(induced_eta0(lambda_x, lambda_q, c), induced_eta1(lambda_x, lambda_q, c))


def _projection_block(seed, block, dim):
    bit_generator = np.random.Philox(key=seed, counter=[0, 0, 0, block])
    return np.random.Generator(bit_generator).standard_normal((PROJECTION_BLOCK, dim))


def iter_projection_blocks(cfg):
    """
    Yield (start, rows) blocks of the m x d projection matrix.

    Row i only depends on (seed, i), so configs that differ only by m share
    their common prefix.
    """
    for block, start in enumerate(range(0, cfg.seq_length, PROJECTION_BLOCK)):
        rows = _projection_block(cfg.seed, block, cfg.dim)
        yield start, rows[: min(PROJECTION_BLOCK, cfg.seq_length - start)]


def projection_directions(cfg):
    """Full m x d projection matrix."""
    return np.concatenate([rows for _, rows in iter_projection_blocks(cfg)], axis=0)


def _check_unit_rows(vectors, dim):
    if vectors.shape[-1] != dim:
        raise SchemeError(f"expected {dim}-dimensional templates, got {vectors.shape[-1]}")
    norms = np.linalg.norm(vectors, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOLERANCE):
        raise SchemeError("templates must be unit-norm")


def embed_many(vectors, cfg, threshold):
    """
    Embed every row of a (count, d) matrix of unit templates.

    Returns:
        np.ndarray of shape (count, m), dtype int8
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    _check_unit_rows(vectors, cfg.dim)

    bits = np.empty((vectors.shape[0], cfg.seq_length), dtype=np.int8)
    for start, rows in iter_projection_blocks(cfg):
        bits[:, start:start + rows.shape[0]] = (vectors @ rows.T) > threshold
    return bits


def embed(v, cfg, threshold):
    """Binary sequence of length m for one unit template."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise SchemeError("embed takes a single vector; use embed_many for batches")
    return embed_many(v, cfg, threshold)[0]


def sample_sphere(count, dim, rng):
    """``count`` independent uniform unit vectors in R^dim."""
    g = rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def correlated_queries(anchors, c, rng):
    """
    One query per anchor row with q . x = c exactly.

    q = c x + sqrt(1 - c^2) w, with w uniform on the sphere orthogonal to x.
    """
    _check_correlation(c)
    anchors = np.atleast_2d(anchors)
    w = rng.standard_normal(anchors.shape)
    w -= np.sum(w * anchors, axis=1, keepdims=True) * anchors
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    queries = c * anchors + math.sqrt(max(0.0, 1.0 - c * c)) * w
    # Renormalise away rounding drift
    return queries / np.linalg.norm(queries, axis=1, keepdims=True)


def sample_pair(c, dim, rng):
    """Draw a CorrelatedPair with exact correlation c."""
    if dim < 2:
        raise SchemeError(f"dim must be >= 2, got {dim}")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    x = sample_sphere(1, dim, rng)
    q = correlated_queries(x, c, rng)
    return CorrelatedPair(enrolled=x[0], query=q[0], correlation=float(c))
