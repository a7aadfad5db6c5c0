"""
Two ways to shrink a group representation of m C nats: a shorter sequence
with the identity surjection, or the full length with a coarser greedy
surjection.
"""
from apps.membership.simulation import run_verification
from apps.schemes.channel import binary_channel
from apps.schemes.infometrics import evaluate
from apps.schemes.utils import get_cached_type_model, resolve_surjection

from ...base import ExperimentCommand
from ...serializers import ReduceConfigSerializer


class Command(ExperimentCommand):
    help = 'P_fn against the budget m C, reducing either m (identity) or |Y| (greedy merges).'
    serializer_class = ReduceConfigSerializer
    columns = ('series', 'm', 'surjection', 'output_symbols', 'compactness', 'budget', 'verification', 'pfn_at_pfp')

    def add_experiment_arguments(self, parser):
        parser.add_argument('--n', type=int)
        parser.add_argument('--p', type=float)
        parser.add_argument('--eta0', type=float)
        parser.add_argument('--eta1', type=float)
        parser.add_argument('--m', type=int, help='Base length of the surjection series')
        parser.add_argument('--lengths', type=int, nargs='+', help='Lengths of the identity series (<= m)')
        parser.add_argument('--target', dest='targets', type=int, nargs='+', help='Output alphabet sizes |Y|')
        parser.add_argument('--groups', type=int)
        parser.add_argument('--negatives-per-group', type=int)
        parser.add_argument('--runs', type=int)

    def _point(self, config, series, m, spelling):
        tm = get_cached_type_model(2, config['p'], config['n'])
        chan = binary_channel(config['eta0'], config['eta1'])
        r = resolve_surjection(spelling, tm, chan)
        metrics = evaluate(tm, r, chan)

        outcome = run_verification({
            'mode': 'sequence', 'n': config['n'], 'm': m, 'p': config['p'],
            'eta0': config['eta0'], 'eta1': config['eta1'], 'surjection': spelling,
            'groups': config['groups'], 'negatives_per_group': config['negatives_per_group'],
            'runs': config['runs'], 'seed': config['seed'],
        })
        return {
            'series': series,
            'm': m,
            'surjection': spelling,
            'output_symbols': r.output_symbols,
            'compactness': metrics.compactness,
            'budget': m * metrics.compactness,
            'verification': metrics.verification,
            'pfn_at_pfp': outcome.pfn_at_pfp,
        }

    def run(self, config, options):
        rows = [self._point(config, 'length', m, 'identity') for m in config['lengths']]
        rows += [self._point(config, 'surjection', config['m'], f'greedy:{k}') for k in config['targets']]
        return rows
