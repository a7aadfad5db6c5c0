"""
Bloom filter against the sparse All-1 scheme at equal false-positive targets.
"""
import logging

import numpy as np

from apps.bloom.bloom import BloomFilter, all_one_enrollment, equivalence_report

from ...base import ExperimentCommand
from ...serializers import BloomCompareConfigSerializer

logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = 'Required lengths of a Bloom filter and of the All-1 scheme, with a measured filter false-positive rate.'
    serializer_class = BloomCompareConfigSerializer
    columns = (
        'n', 'epsilon', 'bloom_bound', 'scheme_bound', 'bounds_equal', 'bloom_m', 'scheme_m', 'exact_scheme_m',
        'hash_count', 'activation_prob', 'bloom_false_positive_rate', 'measured_false_positive_rate',
        'all_one_identical', 'degenerate',
    )

    def add_experiment_arguments(self, parser):
        parser.add_argument('--n', type=int, nargs='+')
        parser.add_argument('--epsilon', type=float, nargs='+')
        parser.add_argument('--probes', type=int, help='Non-member probes for the measured rate (0 to skip)')

    def run(self, config, options):
        seed = config['seed']
        probes = [f'probe:{i}' for i in range(config['probes'])]
        rows = []

        for n in config['n']:
            items = [f'member:{i}' for i in range(n)]
            for epsilon in config['epsilon']:
                report = equivalence_report(n, epsilon)
                row = report.as_dict()
                if report.degenerate:
                    logger.warning(f"epsilon={epsilon} needs no filter bits; skipping the measured rate")
                    rows.append(row)
                    continue

                bloom = BloomFilter.from_items(items, report.bloom_m, report.hash_count, seed=seed)
                enrolled = all_one_enrollment(items, report.bloom_m, report.hash_count, seed=seed)
                row['all_one_identical'] = bool(np.array_equal(enrolled.symbols, bloom.bits))
                if probes:
                    row['measured_false_positive_rate'] = bloom.false_positive_rate(probes)
                rows.append(row)

        return rows
