"""
Monte-Carlo P_fn at the operating P_fp, in sequence mode or on synthetic
correlated templates.
"""
from django.conf import settings
from django.core.management.base import CommandError

from apps.embedding.utils import write_templates
from apps.membership.membership import simulate_scores
from apps.membership.simulation import run_verification

from ...base import CONFIG_ERROR, ExperimentCommand
from ...serializers import PRESETS, SimulateConfigSerializer
from ...utils import format_csv, write_output

SUMMARY_COLUMNS = (
    'mode', 'n', 'm', 'surjection', 'c', 'd', 'p', 'runs',
    'positive_count', 'negative_count', 'operating_pfp', 'achieved_pfp', 'threshold_tau', 'pfn_at_pfp', 'verification',
)


class Command(ExperimentCommand):
    help = 'Enroll groups, score positive and negative queries, and report P_fn at the operating P_fp.'
    serializer_class = SimulateConfigSerializer
    output_format = 'json'

    def add_experiment_arguments(self, parser):
        parser.add_argument('--preset', choices=list(PRESETS), help='Correlation preset (implies vector mode)')
        parser.add_argument('--mode', choices=['sequence', 'vector'])
        parser.add_argument('--n', type=int)
        parser.add_argument('--m', type=int, help='Sequence length; 8 d by default in vector mode')
        parser.add_argument('--alphabet-size', type=int)
        parser.add_argument('--surjection')
        parser.add_argument('--p', type=float)
        parser.add_argument('--eta0', type=float)
        parser.add_argument('--eta1', type=float)
        parser.add_argument('--eta2', type=float)
        parser.add_argument('--c', type=float)
        parser.add_argument('--d', type=int)
        parser.add_argument('--lambda-x', type=float)
        parser.add_argument('--lambda-q', type=float)
        parser.add_argument('--groups', type=int)
        parser.add_argument('--positives-per-group', type=int)
        parser.add_argument('--negatives-per-group', type=int)
        parser.add_argument('--runs', type=int)
        parser.add_argument('--operating-pfp', type=float)
        parser.add_argument('--summary-out', help='Also write a one-row CSV summary')
        parser.add_argument('--templates-out', help='Store the enrolled templates of run 0 (vector mode)')

    def run(self, config, options):
        if options.get('templates_out') and config['mode'] != 'vector':
            raise CommandError("--templates-out needs vector mode", returncode=CONFIG_ERROR)

        outcome = run_verification(config)
        report = outcome.as_dict(bins=settings.GROUPSKETCH['HISTOGRAM_BINS'])

        if options.get('summary_out'):
            summary = {**config, **{key: report[key] for key in SUMMARY_COLUMNS if key in report}}
            write_output(format_csv([summary], SUMMARY_COLUMNS, config), options['summary_out'])

        if options.get('templates_out'):
            _, _, templates = simulate_scores(outcome.config, 0, keep_templates=True)
            write_templates(options['templates_out'], templates)

        return report
