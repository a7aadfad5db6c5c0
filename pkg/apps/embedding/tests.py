import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal
from scipy.special import ndtr

from apps.schemes.exceptions import SchemeError
from apps.schemes.surjection import identity_surjection, majority_surjection

from .embedding import (
    activation_prob,
    activation_threshold,
    embed,
    embed_many,
    induced_channel,
    induced_eta0,
    induced_eta1,
    projection_directions,
    sample_pair,
    sample_sphere,
)
from .models import CorrelatedPair, EmbeddingConfig
from .search import binary_verification, default_grid, grid_search
from .utils import get_cached_rates, read_templates, write_templates


class ActivationTests(SimpleTestCase):

    def test_activation_prob(self):
        self.assertEqual(activation_prob(0.0), 0.5)
        self.assertAlmostEqual(activation_prob(3.0), 0.001350, places=6)

    def test_threshold_inverts_activation(self):
        p = math.log(2) / 16
        lam = activation_threshold(p)
        self.assertAlmostEqual(ndtr(lam), 1 - p, places=12)
        self.assertAlmostEqual(activation_prob(lam), p, places=12)
        with self.assertRaises(SchemeError):
            activation_threshold(0.0)


class EmbedTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(21)

    def test_deterministic(self):
        cfg = EmbeddingConfig(dim=32, seq_length=3000, seed=7)
        v = sample_sphere(1, 32, self.rng)[0]
        assert_array_equal(embed(v, cfg, 0.0), embed(v, cfg, 0.0))
        other = EmbeddingConfig(dim=32, seq_length=3000, seed=8)
        self.assertFalse(np.array_equal(embed(v, cfg, 0.0), embed(v, other, 0.0)))

    def test_longer_sequences_share_prefix(self):
        v = sample_sphere(1, 16, self.rng)[0]
        short = embed(v, EmbeddingConfig(dim=16, seq_length=1500, seed=3), 0.3)
        long = embed(v, EmbeddingConfig(dim=16, seq_length=5000, seed=3), 0.3)
        assert_array_equal(long[:1500], short)
        assert_allclose(
            projection_directions(EmbeddingConfig(dim=16, seq_length=5000, seed=3))[:1500],
            projection_directions(EmbeddingConfig(dim=16, seq_length=1500, seed=3)),
        )

    def test_dense_ones_rate(self):
        m = 1_000_000
        bits = embed(sample_sphere(1, 8, self.rng)[0], EmbeddingConfig(dim=8, seq_length=m, seed=1), 0.0)
        self.assertLessEqual(abs(bits.mean() - 0.5), 3 * math.sqrt(0.25 / m))

    def test_high_threshold_is_silent(self):
        m = 1_000_000
        bits = embed(sample_sphere(1, 8, self.rng)[0], EmbeddingConfig(dim=8, seq_length=m, seed=2), 10.0)
        self.assertLessEqual(bits.mean(), 1e-6)

    def test_batch_matches_single(self):
        cfg = EmbeddingConfig(dim=12, seq_length=2100, seed=5)
        vectors = sample_sphere(4, 12, self.rng)
        batch = embed_many(vectors, cfg, -0.2)
        for row, v in zip(batch, vectors):
            assert_array_equal(row, embed(v, cfg, -0.2))

    def test_rejects_non_unit_vectors(self):
        cfg = EmbeddingConfig(dim=4, seq_length=10)
        with self.assertRaises(SchemeError):
            embed(np.array([1.0, 1.0, 0.0, 0.0]), cfg, 0.0)
        with self.assertRaises(SchemeError):
            embed(np.array([1.0, 0.0, 0.0]), cfg, 0.0)


class CorrelatedPairTests(SimpleTestCase):

    def test_exact_correlation(self):
        for c in (-0.3, 0.0, 0.8, 0.99, 1.0):
            pair = sample_pair(c, 64, np.random.default_rng(4))
            self.assertAlmostEqual(np.linalg.norm(pair.enrolled), 1.0, delta=1e-9)
            self.assertAlmostEqual(np.linalg.norm(pair.query), 1.0, delta=1e-9)
            self.assertAlmostEqual(float(pair.enrolled @ pair.query), c, delta=1e-9)

    def test_extreme_correlations(self):
        assert_allclose(sample_pair(1.0, 8, 11).query, sample_pair(1.0, 8, 11).enrolled, atol=1e-12)
        pair = sample_pair(0.0, 8, 12)
        self.assertAlmostEqual(float(pair.enrolled @ pair.query), 0.0, delta=1e-9)

    def test_invalid_pair(self):
        with self.assertRaises(SchemeError):
            CorrelatedPair(enrolled=np.array([1.0, 0.0]), query=np.array([0.0, 1.0]), correlation=0.5)
        with self.assertRaises(SchemeError):
            sample_pair(1.5, 8, 1)


class InducedRateTests(SimpleTestCase):

    def test_dense_rates_are_angular(self):
        for c in (0.2, 0.5, 0.8, 0.95):
            expected = math.acos(c) / math.pi
            self.assertAlmostEqual(induced_eta0(0.0, 0.0, c), expected, delta=1e-8)
            self.assertAlmostEqual(induced_eta1(0.0, 0.0, c), expected, delta=1e-8)
        self.assertAlmostEqual(induced_eta0(0.0, 0.0, 0.8), 0.204833, places=6)

    def test_independent_templates(self):
        for lambda_x, lambda_q in [(0.0, 0.5), (1.2, -0.4), (-1.0, 1.0)]:
            self.assertAlmostEqual(induced_eta0(lambda_x, lambda_q, 0.0), 1 - ndtr(lambda_q), delta=1e-9)
            self.assertAlmostEqual(induced_eta1(lambda_x, lambda_q, 0.0), ndtr(lambda_q), delta=1e-9)

    def test_identical_templates(self):
        self.assertEqual(induced_eta0(0.7, 0.7, 1.0), 0.0)
        self.assertEqual(induced_eta1(0.7, 0.7, 1.0), 0.0)
        self.assertLess(induced_eta0(0.7, 0.7, 0.9999), 0.01)
        self.assertAlmostEqual(induced_eta0(0.3, 0.3, -1.0), ndtr(-0.3) / ndtr(0.3), delta=1e-12)

    def test_monotone_in_query_threshold(self):
        for lambda_x, c in [(0.0, 0.8), (1.0, 0.8), (-0.5, 0.6)]:
            grid = np.linspace(-1.5, 1.5, 16)
            eta0 = [induced_eta0(lambda_x, lq, c) for lq in grid]
            eta1 = [induced_eta1(lambda_x, lq, c) for lq in grid]
            self.assertTrue(all(a > b for a, b in zip(eta0, eta0[1:])))
            self.assertTrue(all(a < b for a, b in zip(eta1, eta1[1:])))

    def test_matches_monte_carlo(self):
        m = 1_000_000
        cfg = EmbeddingConfig(dim=16, seq_length=m, seed=99)
        for lambda_x, lambda_q, c in [(0.0, 0.0, 0.8), (0.5, 0.8, 0.9), (1.5, 1.6, 0.95)]:
            pair = sample_pair(c, 16, np.random.default_rng(17))
            x_bits = embed(pair.enrolled, cfg, lambda_x)
            q_bits = embed(pair.query, cfg, lambda_q)

            zeros, ones = x_bits == 0, x_bits == 1
            for rate, mask, flipped in [
                (induced_eta0(lambda_x, lambda_q, c), zeros, q_bits[zeros] == 1),
                (induced_eta1(lambda_x, lambda_q, c), ones, q_bits[ones] == 0),
            ]:
                sigma = math.sqrt(rate * (1 - rate) / mask.sum())
                self.assertLessEqual(abs(flipped.mean() - rate), 3 * sigma + 1e-12)

    def test_induced_channel_and_cache(self):
        chan = induced_channel(0.4, 0.6, 0.9)
        self.assertAlmostEqual(chan.eta0, induced_eta0(0.4, 0.6, 0.9))
        self.assertEqual(get_cached_rates(0.4, 0.6, 0.9), (chan.eta0, chan.eta1))
        self.assertEqual(get_cached_rates(0.4, 0.6, 0.9), (chan.eta0, chan.eta1))

    def test_invalid_correlation(self):
        with self.assertRaises(SchemeError):
            induced_eta0(0.0, 0.0, 1.2)


class GridSearchTests(SimpleTestCase):

    def test_default_grid(self):
        grid = default_grid()
        self.assertEqual(len(grid), 41 * 41)
        self.assertEqual(grid[0], (-2.0, -2.0))
        self.assertIn((0.0, 0.0), grid)

    def test_mirrored_source_matches_direct_evaluation(self):
        # p > 1/2 is handled by relabelling 0 <-> 1; compare with the direct joint law
        p, n, eta0, eta1 = 0.7, 3, 0.1, 0.25
        table = majority_surjection(n).table
        w = np.array([[1 - eta0, eta0], [eta1, 1 - eta1]])
        joint = np.zeros((2, 2))
        for bits in np.ndindex(*(2,) * n):
            prob = np.prod([p if b else 1 - p for b in bits])
            y = table[sum(bits)]
            for q in (0, 1):
                joint[q, y] += prob * w[bits[0], q]
        independent = np.outer(joint.sum(axis=1), joint.sum(axis=0))
        brute = float(np.sum(joint * np.log(joint / independent)))
        self.assertAlmostEqual(binary_verification(p, n, eta0, eta1, table), brute, delta=1e-12)

    def test_single_point_grid(self):
        result = grid_search(0.8, 15, 'identity', grid=[(0.3, -0.2)])
        self.assertEqual((result.lambda_x, result.lambda_q), (0.3, -0.2))
        self.assertEqual(result.evaluated, 1)

    def test_empty_grid_and_unknown_family(self):
        with self.assertRaises(SchemeError):
            grid_search(0.8, 15, 'identity', grid=[])
        with self.assertRaises(SchemeError):
            grid_search(0.8, 15, 'median', grid=[(0.0, 0.0)])

    def test_dense_optimum_for_identity(self):
        result = grid_search(0.8, 15, 'identity', grid=default_grid(bound=1.0, step=0.25))
        self.assertEqual((result.lambda_x, result.lambda_q), (0.0, 0.0))
        self.assertAlmostEqual(result.eta0, math.acos(0.8) / math.pi, delta=1e-8)

    def test_sparse_optimum_for_all_one(self):
        n = 15
        result = grid_search(0.99, n, 'all1')
        self.assertGreaterEqual(result.activation_prob, 1 / (3 * n))
        self.assertLessEqual(result.activation_prob, 3 / n)
        self.assertGreaterEqual(result.lambda_q, result.lambda_x)

    def test_best_threshold_family(self):
        best = grid_search(0.9, 9, 'best', grid=[(0.0, 0.0), (1.0, 1.0)])
        majority = grid_search(0.9, 9, 'majority', grid=[(0.0, 0.0), (1.0, 1.0)])
        self.assertGreaterEqual(best.verification, majority.verification - 1e-12)
        self.assertIsNotNone(best.threshold)

    def test_dense_versus_sparse_crossover(self):
        n = 15
        grid = default_grid()

        def dense(c, surjection):
            chan = induced_channel(0.0, 0.0, c)
            return binary_verification(0.5, n, chan.eta0, chan.eta1, surjection.table)

        identity = identity_surjection(n + 1)
        self.assertGreater(dense(0.8, identity), grid_search(0.8, n, 'all1', grid=grid).verification)
        self.assertGreater(grid_search(0.999, n, 'all1', grid=grid).verification, dense(0.999, majority_surjection(n)))


class TemplateFileTests(SimpleTestCase):

    def test_round_trip(self):
        templates = sample_sphere(5, 24, np.random.default_rng(0))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'templates.bin'
            write_templates(path, templates)
            raw = path.read_bytes()
            self.assertEqual(int.from_bytes(raw[:4], 'little'), raw.index(b'}') - 3)
            assert_allclose(read_templates(path), templates.astype(np.float32), atol=0)

    def test_truncated_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'broken.bin'
            write_templates(path, sample_sphere(2, 4, np.random.default_rng(1)))
            path.write_bytes(path.read_bytes()[:-3])
            with self.assertRaises(SchemeError):
                read_templates(path)
