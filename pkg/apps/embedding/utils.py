"""
Cached induced rates and the template matrix file format.

Template files: a 4-byte little-endian header length, a UTF-8 JSON header
{"dim", "count", "dtype"}, then ``count`` rows of ``dim`` little-endian
float32 values.
"""
import json
import logging
import os
import struct
import tempfile
from pathlib import Path

import numpy as np
from django.conf import settings
from django.core.cache import cache

from apps.schemes.exceptions import SchemeError

from .embedding import induced_eta0, induced_eta1

logger = logging.getLogger(__name__)

TEMPLATE_DTYPE = '<f4'
HEADER_LENGTH = struct.Struct('<I')


def get_cached_rates(lambda_x, lambda_q, c):
    """
    Get (eta0, eta1) from cache or integrate them.

    A grid search evaluates the same (lambda_x, lambda_q, c) once per surjection
    family, so the quadrature is shared across families.
    """
    cache_key = f'induced_rates_{float(lambda_x)!r}_{float(lambda_q)!r}_{float(c)!r}'
    rates = cache.get(cache_key)

    if rates is None:
        rates = (induced_eta0(lambda_x, lambda_q, c), induced_eta1(lambda_x, lambda_q, c))
        cache.set(cache_key, rates, timeout=settings.GROUPSKETCH['CACHE_TIMEOUT'])

    return rates


def write_templates(path, templates):
    """Atomically write a (count, d) template matrix."""
    templates = np.atleast_2d(np.asarray(templates, dtype=TEMPLATE_DTYPE))
    count, dim = templates.shape
    header = json.dumps({'dim': dim, 'count': count, 'dtype': 'float32'}).encode('utf-8')

    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.')
    try:
        with os.fdopen(fd, 'wb') as fh:
            fh.write(HEADER_LENGTH.pack(len(header)))
            fh.write(header)
            fh.write(templates.tobytes(order='C'))
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise

    logger.info(f"Wrote {count} templates of dimension {dim} to {path}")


def read_templates(path):
    """
    Read a template matrix written by ``write_templates``.

    Returns:
        np.ndarray of shape (count, d), dtype float64
    """
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_LENGTH.size:
        raise SchemeError(f"{path}: truncated template file")

    (header_length,) = HEADER_LENGTH.unpack_from(raw)
    body_start = HEADER_LENGTH.size + header_length
    try:
        header = json.loads(raw[HEADER_LENGTH.size:body_start].decode('utf-8'))
        dim, count = int(header['dim']), int(header['count'])
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemeError(f"{path}: invalid template header: {exc}") from exc

    if header.get('dtype', 'float32') != 'float32':
        raise SchemeError(f"{path}: unsupported dtype {header['dtype']}")
    body = raw[body_start:]
    if len(body) != count * dim * 4:
        raise SchemeError(f"{path}: expected {count} x {dim} float32 values, found {len(body)} bytes")

    return np.frombuffer(body, dtype=TEMPLATE_DTYPE).reshape(count, dim).astype(float)
