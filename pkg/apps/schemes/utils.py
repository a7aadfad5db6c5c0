"""
Helpers shared by commands and simulations: cached type models and the
surjection spelling grammar used on the command line.
"""
from pathlib import Path

from django.conf import settings
from django.core.cache import cache

from .exceptions import SchemeError
from .models import SourceModel, Surjection
from .source_model import build_type_model
from .surjection import (
    all_one_surjection,
    best_threshold,
    greedy_merge,
    identity_surjection,
    majority_surjection,
    threshold_surjection,
)

SURJECTION_FAMILIES = ('identity', 'all1', 'majority', 'best', 'threshold:<t>', 'greedy:<k>', 'file:<path>')


def get_cached_type_model(alphabet_size, p, n):
    """
    Get a TypeModel from cache or build it.

    Args:
        alphabet_size: |X|
        p: activation probability
        n: group size

    Returns:
        TypeModel
    """
    cache_key = f'type_model_{alphabet_size}_{float(p)!r}_{n}'
    tm = cache.get(cache_key)

    if tm is None:
        tm = build_type_model(SourceModel(alphabet_size, float(p)), n)
        cache.set(cache_key, tm, timeout=settings.GROUPSKETCH['CACHE_TIMEOUT'])

    return tm


def invalidate_type_model_cache(alphabet_size, p, n):
    """Drop one cached type model."""
    cache.delete(f'type_model_{alphabet_size}_{float(p)!r}_{n}')


def _require_binary(tm, spelling):
    if tm.alphabet_size != 2:
        raise SchemeError(f"surjection '{spelling}' needs a binary alphabet")


def resolve_surjection(spelling, tm, chan):
    """
    Build a surjection from its command-line spelling.

    Accepted forms: identity, all1, majority, best, threshold:<t>,
    greedy:<k>, file:<path to a JSON array>.

    Args:
        spelling: surjection spelling
        tm: TypeModel the surjection applies to
        chan: NoiseChannel (used by 'best' and 'greedy')

    Returns:
        Surjection
    """
    name, _, arg = spelling.partition(':')
    n = tm.group_size

    if name == 'identity':
        return identity_surjection(tm.type_count)

    if name == 'all1':
        _require_binary(tm, spelling)
        return all_one_surjection(n)

    if name == 'majority':
        _require_binary(tm, spelling)
        return majority_surjection(n)

    if name == 'best':
        _require_binary(tm, spelling)
        t, _ = best_threshold(tm.source.activation_prob, n, chan)
        return Surjection(threshold_surjection(n, t).table, name='best')

    if name == 'threshold':
        _require_binary(tm, spelling)
        if not arg.isdigit():
            raise SchemeError(f"invalid threshold in '{spelling}'")
        return threshold_surjection(n, int(arg))

    if name == 'greedy':
        if not arg.isdigit():
            raise SchemeError(f"invalid target size in '{spelling}'")
        target = int(arg)
        return Surjection(
            greedy_merge(tm, identity_surjection(tm.type_count), chan, target).table,
            name=f'greedy:{target}',
        )

    if name == 'file':
        path = Path(arg)
        if not path.is_file():
            raise SchemeError(f"surjection file not found: {arg}")
        r = Surjection.from_json(path.read_text(), name=f'file:{path.name}')
        if r.type_count != tm.type_count:
            raise SchemeError(f"{arg} covers {r.type_count} types, expected {tm.type_count}")
        return r

    raise SchemeError(f"unknown surjection '{spelling}'; expected one of {', '.join(SURJECTION_FAMILIES)}")
