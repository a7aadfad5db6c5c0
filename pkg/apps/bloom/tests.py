import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_array_equal

from apps.schemes.exceptions import SchemeError

from .bloom import BloomFilter, all_one_enrollment, equivalence_report, expected_false_positive_rate, optimal_k


def members(count, prefix='member'):
    return [f'{prefix}-{i}' for i in range(count)]


class OptimalHashCountTests(SimpleTestCase):

    def test_values(self):
        self.assertEqual(optimal_k(1024, 64), 11)
        self.assertEqual(optimal_k(64, 64), 1)
        self.assertEqual(optimal_k(640, 64), 6)
        self.assertEqual(optimal_k(3, 64), 1)

    def test_invalid(self):
        with self.assertRaises(SchemeError):
            optimal_k(0, 4)


class BloomFilterTests(SimpleTestCase):

    def test_insert_then_contains(self):
        bloom = BloomFilter(256, 4)
        self.assertFalse(bloom.contains(b'a'))
        bloom.insert(b'a')
        self.assertTrue(bloom.contains(b'a'))
        self.assertIn('a', bloom)
        self.assertEqual(bloom.bits.sum(), len(set(bloom.positions(b'a'))))

    def test_empty_filter_contains_nothing(self):
        bloom = BloomFilter(128, 3, seed=9)
        self.assertFalse(any(bloom.contains(item) for item in members(100)))

    def test_no_false_negatives(self):
        rng = np.random.default_rng(3)
        for size, count in [(16, 40), (512, 64), (4096, 500), (1 << 17, 10_000)]:
            items = [rng.bytes(int(rng.integers(1, 24))) for _ in range(count)]
            bloom = BloomFilter.from_items(items, size, seed=int(rng.integers(0, 2 ** 63)))
            self.assertTrue(all(item in bloom for item in items))

    def test_seed_changes_positions(self):
        self.assertFalse(np.array_equal(BloomFilter(1 << 20, 8, seed=1).positions('x'),
                                        BloomFilter(1 << 20, 8, seed=2).positions('x')))
        assert_array_equal(BloomFilter(1024, 8, seed=5).positions('x'), BloomFilter(1024, 8, seed=5).positions('x'))

    def test_false_positive_rate_given_fill(self):
        bloom = BloomFilter.from_items(members(64), 1024, 11, seed=17)
        fill = bloom.bits.mean()
        observed = bloom.false_positive_rate(members(100_000, 'probe'))
        expected = fill ** 11
        self.assertLessEqual(abs(observed - expected), 3 * math.sqrt(expected * (1 - expected) / 100_000) + 1e-4)

    def test_false_positive_rate_matches_formula(self):
        expected = expected_false_positive_rate(1024, 64, 11)
        probes = members(10_000, 'probe')
        rates = [
            BloomFilter.from_items(members(64), 1024, 11, seed=seed).false_positive_rate(probes)
            for seed in range(10)
        ]
        sigma = math.sqrt(expected * (1 - expected) / 100_000)
        self.assertLessEqual(abs(np.mean(rates) - expected), 3 * sigma)

    def test_invalid_parameters(self):
        with self.assertRaises(SchemeError):
            BloomFilter(0, 3)
        with self.assertRaises(SchemeError):
            BloomFilter(64, 0)
        with self.assertRaises(SchemeError):
            BloomFilter(64, 3, seed=-1)


class EquivalenceTests(SimpleTestCase):

    def test_all_one_enrollment_is_the_filter(self):
        for count, size, seed in [(1, 64, 0), (64, 1024, 7), (200, 512, 2 ** 40 + 3)]:
            items = members(count)
            bloom = BloomFilter.from_items(items, size, optimal_k(size, count), seed=seed)
            rep = all_one_enrollment(items, size, optimal_k(size, count), seed=seed)
            assert_array_equal(rep.symbols, bloom.bits)

    def test_report(self):
        report = equivalence_report(64, 0.05)
        self.assertAlmostEqual(report.bloom_bound, 64 * math.log(20) / math.log(2) ** 2)
        self.assertTrue(report.bounds_equal)
        # 64 log(20) / (log 2)^2 = 399.05
        self.assertEqual(report.bloom_m, 400)
        self.assertEqual(report.scheme_m, 400)
        self.assertEqual(report.hash_count, 4)
        self.assertLessEqual(abs(report.exact_scheme_m - report.scheme_m), 4)
        self.assertFalse(report.degenerate)

    def test_degenerate_target(self):
        report = equivalence_report(16, 1.0)
        self.assertTrue(report.degenerate)
        self.assertEqual(report.bloom_m, 0)
        self.assertEqual(report.scheme_m, 0)

    def test_single_member(self):
        report = equivalence_report(1, math.exp(-math.log(2) ** 2))
        self.assertEqual(report.bloom_m, 1)
        self.assertEqual(report.scheme_m, 1)
        self.assertIsNone(report.exact_scheme_m)

    def test_invalid_target(self):
        with self.assertRaises(SchemeError):
            equivalence_report(4, 0.0)
