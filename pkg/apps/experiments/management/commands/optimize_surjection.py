"""
Greedy surjection coarsening, best threshold and the noiseless V gradient.
"""
import logging
import math

from apps.schemes.channel import symmetric_channel
from apps.schemes.exceptions import UnverifiableScheme
from apps.schemes.infometrics import evaluate, required_length
from apps.schemes.surjection import best_threshold, greedy_chain, surjection_gradient, threshold_surjection
from apps.schemes.utils import get_cached_type_model, resolve_surjection

from ...base import ExperimentCommand
from ...serializers import OptimizeSurjectionConfigSerializer

logger = logging.getLogger(__name__)


def _json_number(value):
    """Finite floats as-is, signed infinities as strings, NaN as null."""
    value = float(value)
    if math.isnan(value):
        return None
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return value


def _describe(tm, r, chan, epsilon):
    metrics = evaluate(tm, r, chan)
    try:
        length = required_length(metrics.verification, epsilon)
    except UnverifiableScheme:
        length = None
    return {
        'name': r.name,
        'output_symbols': r.output_symbols,
        'table': r.table.tolist(),
        **metrics.as_dict(),
        'required_length': length,
    }


class Command(ExperimentCommand):
    help = 'Merge output symbols greedily down to each target |Y| and report the resulting tables.'
    serializer_class = OptimizeSurjectionConfigSerializer
    output_format = 'json'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--n', type=int)
        parser.add_argument('--alphabet-size', type=int)
        parser.add_argument('--p', type=float)
        parser.add_argument('--eta0', type=float)
        parser.add_argument('--eta1', type=float)
        parser.add_argument('--eta2', type=float)
        parser.add_argument('--start', help='Surjection the merges start from')
        parser.add_argument('--target', dest='targets', type=int, nargs='+')
        parser.add_argument('--epsilon', type=float, help='False-positive target for the required length')
        parser.add_argument('--gradient', action='store_true', default=None,
                            help='Report dV/dtheta at the best threshold (noiseless)')

    def run(self, config, options):
        n, p, epsilon = config['n'], config['p'], config['epsilon']
        tm = get_cached_type_model(config['alphabet_size'], p, n)
        chan = symmetric_channel(config['alphabet_size'], config['eta0'], config['eta1'], config['eta2'])
        start = resolve_surjection(config['start'], tm, chan)

        targets = [k for k in config['targets'] if k <= start.output_symbols]
        for k in sorted(set(config['targets']) - set(targets)):
            logger.warning(f"Skipping target {k}: {config['start']} has only {start.output_symbols} symbols")

        chain = greedy_chain(tm, chan, targets, start=start)
        result = {
            'start': _describe(tm, start, chan, epsilon),
            'surjections': [_describe(tm, chain[k], chan, epsilon) for k in sorted(chain, reverse=True)],
        }

        if tm.alphabet_size == 2:
            t, v = best_threshold(p, n, chan)
            result['best_threshold'] = {'threshold': t, 'verification': v}

            if config['gradient']:
                if not chan.is_noiseless:
                    logger.warning("The gradient is computed for the noiseless channel")
                report = surjection_gradient(p, n, threshold_surjection(n, t).table.astype(float))
                result['gradient'] = {
                    'theta': threshold_surjection(n, t).table.tolist(),
                    'gradient': [_json_number(g) for g in report.gradient],
                    'k2': _json_number(report.k2),
                    'delta': _json_number(report.delta),
                    'diverged': report.diverged,
                }

        return result
