"""
Best quantizer thresholds and V per correlation and surjection family.
"""
from apps.embedding.search import default_grid, grid_search

from ...base import ExperimentCommand
from ...serializers import CorrelationSweepConfigSerializer


class Command(ExperimentCommand):
    help = 'Grid-search (lambda_x, lambda_q) for every correlation c and surjection family.'
    serializer_class = CorrelationSweepConfigSerializer
    columns = ('c', 'family', 'd', 'n', 'lambda_x', 'lambda_q', 'p', 'eta0', 'eta1', 'threshold', 'verification')

    def add_experiment_arguments(self, parser):
        parser.add_argument('--d', type=int, help='Template dimension (reported; V does not depend on it)')
        parser.add_argument('--n', type=int)
        parser.add_argument('--c', type=float, nargs='+')
        parser.add_argument('--family', dest='families', nargs='+')
        parser.add_argument('--bound', type=float, help='Grid covers [-bound, bound] on both thresholds')
        parser.add_argument('--step', type=float)

    def run(self, config, options):
        grid = default_grid(config['bound'], config['step'])
        rows = []
        for c in config['c']:
            for family in config['families']:
                result = grid_search(c, config['n'], family, grid)
                rows.append({**result.as_row(), 'd': config['d'], 'n': config['n']})
        return rows
