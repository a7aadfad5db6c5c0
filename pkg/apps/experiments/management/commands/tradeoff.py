"""
Compactness / security / verification trade-off over a p grid.
"""
from apps.schemes.channel import symmetric_channel
from apps.schemes.infometrics import AsymptoticSetup, asymptotic_kappa, metric_row, optimal_activation
from apps.schemes.utils import get_cached_type_model, resolve_surjection

from ...base import ExperimentCommand
from ...serializers import TradeoffConfigSerializer

# Families whose table does not depend on p
P_FREE_FAMILIES = ('identity', 'all1', 'majority')


class Command(ExperimentCommand):
    help = (
        'Emit (p, surjection, C, S, V) rows for an |X|-ary source; for binary sources the asymptotic '
        'reference rows are appended.'
    )
    serializer_class = TradeoffConfigSerializer
    columns = (
        'kind', 'n', 'alphabet_size', 'p', 'surjection', 'output_symbols', 'eta0', 'eta1',
        'compactness', 'security', 'verification', 'source_entropy', 'n_times_v',
    )

    def add_experiment_arguments(self, parser):
        parser.add_argument('--n', type=int)
        parser.add_argument('--alphabet-size', type=int, help='|X|, 2 by default')
        grid = parser.add_mutually_exclusive_group()
        grid.add_argument('--p', type=float, nargs='+', help='Activation probabilities in (0, 1/|X|]')
        grid.add_argument('--alpha', type=float, nargs='+', help='Sparse grid, p = alpha/n')
        parser.add_argument('--surjection', dest='surjections', nargs='+')
        parser.add_argument('--eta0', type=float)
        parser.add_argument('--eta1', type=float)
        parser.add_argument('--eta2', type=float)
        parser.add_argument('--with-optimum', action='store_true', default=None,
                            help='Append the V-maximising p of each p-independent binary family')

    def run(self, config, options):
        n, alphabet_size = config['n'], config['alphabet_size']
        chan = symmetric_channel(alphabet_size, config['eta0'], config['eta1'], config['eta2'])
        rows = []

        for spelling in config['surjections']:
            for p in config['p']:
                tm = get_cached_type_model(alphabet_size, p, n)
                row = metric_row(tm, resolve_surjection(spelling, tm, chan), chan, label=spelling)
                rows.append({'kind': 'exact', 'alphabet_size': alphabet_size, **row})

        if alphabet_size != 2:
            return rows

        if config['with_optimum']:
            reference = get_cached_type_model(2, 0.5, n)
            for spelling in config['surjections']:
                if spelling not in P_FREE_FAMILIES:
                    continue
                p_star, v_star = optimal_activation(n, resolve_surjection(spelling, reference, chan), chan)
                rows.append({
                    'kind': 'optimum', 'n': n, 'alphabet_size': 2, 'p': p_star, 'surjection': spelling,
                    'eta0': chan.eta0, 'eta1': chan.eta1, 'verification': v_star, 'n_times_v': n * v_star,
                })

        for setup in AsymptoticSetup:
            constant = asymptotic_kappa(setup)
            rows.append({
                'kind': 'asymptotic', 'n': n, 'alphabet_size': 2, 'p': constant.activation_prob(n),
                'surjection': setup.value, 'verification': constant.kappa / n, 'n_times_v': constant.kappa,
            })

        return rows
