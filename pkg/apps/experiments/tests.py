import csv
import json
import math
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from apps.embedding.utils import read_templates

from .serializers import ReduceConfigSerializer, TradeoffConfigSerializer
from .utils import CSV_PREFIX


def run(command, *args):
    out = StringIO()
    call_command(command, *args, stdout=out)
    return out.getvalue()


def csv_rows(text):
    lines = text.splitlines()
    return list(csv.DictReader(lines[1:]))


class OutputTests(SimpleTestCase):

    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = Path(tmp.name)

    def test_csv_header(self):
        text = run('tradeoff', '--n', '4', '--p', '0.5', '--surjection', 'identity')
        first = text.splitlines()[0]
        self.assertTrue(first.startswith(f'{CSV_PREFIX}schema=1 config='))
        self.assertEqual(json.loads(first.partition(' config=')[2])['n'], 4)

    def test_replay_reproduces_csv(self):
        first, second = self.tmp / 'first.csv', self.tmp / 'second.csv'
        run('tradeoff', '--n', '6', '--p', '0.1', '0.3', '--eta0', '0.05', '--out', str(first))
        run('tradeoff', '--replay', str(first), '--out', str(second))
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_replay_reproduces_simulation(self):
        first, second = self.tmp / 'first.json', self.tmp / 'second.json'
        run('simulate', '--n', '4', '--m', '32', '--p', '0.3', '--eta0', '0.1', '--runs', '2',
            '--groups', '3', '--negatives-per-group', '20', '--seed', '8', '--out', str(first))
        run('simulate', '--replay', str(first), '--out', str(second))
        self.assertEqual(first.read_bytes(), second.read_bytes())
        self.assertEqual(json.loads(first.read_text())['schema_version'], 1)

    def test_missing_replay_file(self):
        with self.assertRaises(CommandError) as cm:
            run('tradeoff', '--replay', str(self.tmp / 'absent.csv'))
        self.assertEqual(cm.exception.returncode, 2)

    def test_no_partial_file_on_failure(self):
        target = self.tmp / 'out.json'
        with self.assertRaises(CommandError):
            run('simulate', '--n', '2', '--m', '8', '--p', '0.5', '--groups', '1',
                '--negatives-per-group', '5', '--runs', '1', '--out', str(target))
        self.assertEqual(list(self.tmp.iterdir()), [])


class TradeoffCommandTests(SimpleTestCase):

    def test_default_surjections(self):
        rows = csv_rows(run('tradeoff'))
        exact = [row for row in rows if row['kind'] == 'exact']
        self.assertEqual({row['surjection'] for row in exact}, {'identity', 'all1', 'majority'})
        self.assertTrue(all(row['n'] == '16' for row in exact))
        self.assertEqual(len([row for row in rows if row['kind'] == 'asymptotic']), 4)

    def test_single_identity_row(self):
        rows = [row for row in csv_rows(run('tradeoff', '--p', '0.2', '--surjection', 'identity'))
                if row['kind'] == 'exact']
        self.assertEqual(len(rows), 1)
        row = rows[0]
        self.assertAlmostEqual(float(row['verification']) + float(row['security']), float(row['source_entropy']),
                               delta=1e-9)

    def test_dense_row_near_half(self):
        rows = csv_rows(run('tradeoff', '--n', '64', '--p', '0.5', '--surjection', 'identity'))
        self.assertAlmostEqual(float(rows[0]['n_times_v']), 0.5, delta=0.02)

    def test_optimum_rows(self):
        rows = csv_rows(run('tradeoff', '--n', '128', '--p', '0.01', '--surjection', 'identity', '--with-optimum'))
        optimum = [row for row in rows if row['kind'] == 'optimum']
        self.assertEqual(len(optimum), 1)
        self.assertAlmostEqual(128 * float(optimum[0]['p']), 1.338, delta=0.15)

    def test_invalid_grid(self):
        with self.assertRaises(CommandError) as cm:
            run('tradeoff', '--p', '0.3', '0.1')
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            run('tradeoff', '--surjection', 'median')
        self.assertEqual(cm.exception.returncode, 2)

    def test_zero_activation_is_config_error(self):
        with self.assertRaises(CommandError) as cm:
            run('tradeoff', '--p', '0', '0.1')
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            run('reduce', '--p', '0')
        self.assertEqual(cm.exception.returncode, 2)

    def test_ternary_alphabet(self):
        rows = csv_rows(run('tradeoff', '--alphabet-size', '3', '--n', '4', '--p', '0.1', '0.3'))
        self.assertEqual([row['kind'] for row in rows], ['exact', 'exact'])
        for row in rows:
            self.assertEqual((row['alphabet_size'], row['surjection']), ('3', 'identity'))
            self.assertAlmostEqual(float(row['verification']) + float(row['security']),
                                   float(row['source_entropy']), delta=1e-9)

        default_grid = TradeoffConfigSerializer(data={'alphabet_size': 3})
        self.assertTrue(default_grid.is_valid(), default_grid.errors)
        self.assertEqual(len(default_grid.validated_data['p']), 50)
        self.assertAlmostEqual(default_grid.validated_data['p'][-1], 1 / 3, delta=1e-6)

    def test_ternary_rejects_binary_families(self):
        with self.assertRaises(CommandError) as cm:
            run('tradeoff', '--alphabet-size', '3', '--surjection', 'all1')
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            run('tradeoff', '--alphabet-size', '3', '--p', '0.4')
        self.assertEqual(cm.exception.returncode, 2)

    def test_alpha_grid(self):
        rows = [row for row in csv_rows(run('tradeoff', '--n', '16', '--alpha', '0.5', '1.338',
                                            '--surjection', 'identity'))
                if row['kind'] == 'exact']
        self.assertEqual([float(row['p']) for row in rows], [0.5 / 16, 1.338 / 16])

        serializer = TradeoffConfigSerializer(data={'n': 16, 'alpha': [1.0], 'p': [0.2]})
        self.assertFalse(serializer.is_valid())
        serializer = TradeoffConfigSerializer(data={'n': 16, 'alpha': [0.0]})
        self.assertFalse(serializer.is_valid())

    def test_alpha_grid_replays(self):
        with tempfile.TemporaryDirectory() as tmp:
            first, second = Path(tmp) / 'first.csv', Path(tmp) / 'second.csv'
            run('tradeoff', '--n', '8', '--alpha', '0.7', '--surjection', 'all1', '--out', str(first))
            run('tradeoff', '--replay', str(first), '--out', str(second))
            self.assertEqual(first.read_bytes(), second.read_bytes())


class CorrelationSweepCommandTests(SimpleTestCase):

    def test_single_point(self):
        rows = csv_rows(run('sweep_correlation', '--c', '0.8', '--family', 'identity', '--bound', '1', '--step', '0.5'))
        self.assertEqual(len(rows), 1)
        self.assertEqual(rows[0]['d'], '256')
        self.assertEqual(rows[0]['n'], '15')

    def test_dense_verification_increases_with_correlation(self):
        rows = csv_rows(run('sweep_correlation', '--c', '0.5', '0.8', '0.95', '--family', 'identity',
                            '--bound', '1', '--step', '0.5'))
        values = [float(row['verification']) for row in rows]
        self.assertTrue(all(a < b for a, b in zip(values, values[1:])))


class SimulateCommandTests(SimpleTestCase):

    def test_preset(self):
        report = json.loads(run('simulate', '--preset', 'easy', '--n', '4', '--runs', '1', '--groups', '1',
                                '--negatives-per-group', '20'))
        config = report['config']
        self.assertEqual((config['c'], config['d'], config['m'], config['mode']), (0.83, 128, 1024, 'vector'))
        self.assertEqual(len(report['histogram']['positive']['counts']), 256)
        self.assertTrue(0.0 <= report['pfn_at_pfp'] <= 1.0)

    def test_hard_preset_values(self):
        report = json.loads(run('simulate', '--preset', 'hard', '--n', '2', '--m', '64', '--runs', '1',
                                '--groups', '1', '--negatives-per-group', '20'))
        self.assertEqual((report['config']['c'], report['config']['d']), (0.68, 512))

    def test_templates_and_summary(self):
        with tempfile.TemporaryDirectory() as tmp:
            templates, summary = Path(tmp) / 'enrolled.bin', Path(tmp) / 'summary.csv'
            run('simulate', '--mode', 'vector', '--c', '0.9', '--d', '16', '--n', '3', '--runs', '1',
                '--groups', '2', '--negatives-per-group', '20', '--templates-out', str(templates),
                '--summary-out', str(summary))
            self.assertEqual(read_templates(templates).shape, (6, 16))
            rows = csv_rows(summary.read_text())
            self.assertEqual(rows[0]['m'], '128')

    def test_config_error(self):
        with self.assertRaises(CommandError) as cm:
            run('simulate', '--mode', 'vector', '--d', '16')
        self.assertEqual(cm.exception.returncode, 2)
        with self.assertRaises(CommandError) as cm:
            run('simulate', '--n', '2', '--m', '8', '--p', '0.5', '--templates-out', 'unused.bin')
        self.assertEqual(cm.exception.returncode, 2)

    def test_numerical_error(self):
        with self.assertRaises(CommandError) as cm:
            run('simulate', '--n', '2', '--m', '8', '--p', '0.5', '--groups', '1', '--negatives-per-group', '5',
                '--runs', '1')
        self.assertEqual(cm.exception.returncode, 3)


class ReduceCommandTests(SimpleTestCase):

    def test_default_targets(self):
        serializer = ReduceConfigSerializer(data={})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['targets'], [8, 4, 3])
        self.assertEqual(serializer.validated_data['n'], 16)
        self.assertEqual(serializer.validated_data['lengths'], [64, 128, 192, 256])

    def test_series(self):
        rows = csv_rows(run('reduce', '--n', '4', '--m', '32', '--lengths', '16', '32', '--target', '5', '3',
                            '--runs', '2', '--groups', '5', '--negatives-per-group', '20'))
        self.assertEqual([row['series'] for row in rows], ['length', 'length', 'surjection', 'surjection'])

        full_length = rows[1]
        unmerged = next(row for row in rows if row['surjection'] == 'greedy:5')
        self.assertEqual(full_length['pfn_at_pfp'], unmerged['pfn_at_pfp'])
        self.assertEqual(full_length['budget'], unmerged['budget'])

        for row in rows:
            self.assertAlmostEqual(float(row['budget']), int(row['m']) * float(row['compactness']))
        merged = next(row for row in rows if row['surjection'] == 'greedy:3')
        self.assertLess(float(merged['budget']), float(full_length['budget']))

    def test_target_too_large(self):
        with self.assertRaises(CommandError) as cm:
            run('reduce', '--n', '4', '--target', '6')
        self.assertEqual(cm.exception.returncode, 2)


class BloomCompareCommandTests(SimpleTestCase):

    def test_rows(self):
        rows = csv_rows(run('bloom_compare', '--n', '64', '--epsilon', '0.05', '1.0', '--probes', '2000'))
        regular, degenerate = rows
        self.assertEqual(regular['bloom_m'], '400')
        self.assertEqual(regular['scheme_m'], '400')
        self.assertEqual(regular['bounds_equal'], 'True')
        self.assertEqual(regular['all_one_identical'], 'True')
        self.assertLess(float(regular['measured_false_positive_rate']), 0.2)
        self.assertEqual(degenerate['degenerate'], 'True')
        self.assertEqual(degenerate['bloom_m'], '0')


class OptimizeSurjectionCommandTests(SimpleTestCase):

    def test_greedy_chain(self):
        report = json.loads(run('optimize_surjection', '--n', '6', '--p', '0.4', '--eta0', '0.05',
                                '--target', '2', '4', '3'))
        sizes = [entry['output_symbols'] for entry in report['surjections']]
        self.assertEqual(sizes, [4, 3, 2])
        values = [report['start']['verification']] + [entry['verification'] for entry in report['surjections']]
        self.assertTrue(all(a >= b - 1e-12 for a, b in zip(values, values[1:])))
        for entry in report['surjections']:
            self.assertEqual(entry['required_length'], math.ceil(-math.log(0.05) / entry['verification']))
        self.assertIn('best_threshold', report)

    def test_gradient(self):
        report = json.loads(run('optimize_surjection', '--n', '5', '--p', '0.3', '--target', '2', '--gradient'))
        self.assertEqual(len(report['gradient']['gradient']), 6)

    def test_boundary_gradient_is_standard_json(self):
        def reject(token):
            raise ValueError(token)

        text = run('optimize_surjection', '--n', '1', '--p', '0.3', '--target', '2', '--gradient')
        report = json.loads(text, parse_constant=reject)
        gradient = report['gradient']
        self.assertEqual(gradient['theta'], [0, 1])
        self.assertEqual(gradient['gradient'], ['-inf', 'inf'])
        self.assertTrue(gradient['diverged'])
        self.assertIsNone(gradient['k2'])

    def test_oversized_target_skipped(self):
        report = json.loads(run('optimize_surjection', '--n', '3', '--p', '0.5', '--start', 'majority',
                                '--target', '3', '2'))
        self.assertEqual([entry['output_symbols'] for entry in report['surjections']], [2])

    def test_ternary(self):
        report = json.loads(run('optimize_surjection', '--n', '3', '--alphabet-size', '3', '--p', '0.2',
                                '--eta0', '0.02', '--eta1', '0.05', '--target', '4'))
        self.assertEqual(len(report['start']['table']), 10)
        self.assertNotIn('best_threshold', report)
