import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from apps.schemes.channel import binary_channel, noiseless_channel, symmetric_channel
from apps.schemes.exceptions import SchemeError
from apps.schemes.models import SourceModel
from apps.schemes.surjection import all_one_surjection, identity_surjection

from .exceptions import SimulationError
from .membership import enroll, pfn_at_pfp, score, score_many, simulate_scores
from .models import HARD_REJECT, Scheme
from .serializers import VerificationConfigSerializer
from .simulation import empirical_exponent, run_verification


def make_scheme(p, n, surjection, chan):
    return Scheme(source=SourceModel(chan.alphabet_size, p), group_size=n, surjection=surjection, channel=chan)


class EnrollTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_single_member_identity(self):
        x = self.rng.integers(0, 2, (1, 50))
        rep = enroll(x, identity_surjection(2))
        assert_array_equal(rep.symbols, x[0])

    def test_order_invariance(self):
        for alphabet_size, n in [(2, 7), (3, 4)]:
            r = identity_surjection(math.comb(n + alphabet_size - 1, alphabet_size - 1))
            x = self.rng.integers(0, alphabet_size, (n, 200))
            reference = enroll(x, r, alphabet_size).symbols
            for _ in range(5):
                assert_array_equal(enroll(x[self.rng.permutation(n)], r, alphabet_size).symbols, reference)

    def test_all_one(self):
        rep = enroll(np.array([[1], [0], [1]]), all_one_surjection(3))
        self.assertEqual(rep.symbols.tolist(), [1])
        rep = enroll(np.zeros((3, 4), dtype=int), all_one_surjection(3))
        self.assertEqual(rep.symbols.tolist(), [0, 0, 0, 0])

    def test_surjection_size_mismatch(self):
        with self.assertRaises(SchemeError):
            enroll(np.zeros((3, 4), dtype=int), identity_surjection(3))
        with self.assertRaises(SchemeError):
            enroll(np.zeros(4, dtype=int), identity_surjection(2))


class ScoreTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(1)

    def test_score_table(self):
        scheme = make_scheme(0.5, 2, identity_surjection(3), noiseless_channel())
        log2 = math.log(2)
        assert_allclose(scheme.llr, [[log2, 0.0, -np.inf], [-np.inf, 0.0, log2]])

        rep = enroll(np.array([[0, 1, 1], [0, 0, 1]]), scheme.surjection, scheme=scheme)
        self.assertEqual(rep.symbols.tolist(), [0, 1, 2])
        self.assertAlmostEqual(score(np.array([0, 1, 1]), rep), 2 * log2)
        self.assertEqual(score(np.array([1, 1, 1]), rep), HARD_REJECT)

    def test_useless_scheme_scores_zero(self):
        scheme = make_scheme(0.5, 4, identity_surjection(5), binary_channel(0.5, 0.5))
        rep = enroll(self.rng.integers(0, 2, (4, 100)), scheme.surjection, scheme=scheme)
        assert_allclose(score_many(self.rng.integers(0, 2, (20, 100)), rep), 0.0, atol=1e-9)

    def test_all_one_never_rejects_members(self):
        n = 16
        scheme = make_scheme(math.log(2) / n, n, all_one_surjection(n), noiseless_channel())
        members = (self.rng.random((n, 400)) < scheme.source.activation_prob).astype(int)
        rep = enroll(members, scheme.surjection, scheme=scheme)
        self.assertTrue(np.all(score_many(members, rep) > HARD_REJECT / 2))
        impostors = (self.rng.random((200, 400)) < scheme.source.activation_prob).astype(int)
        self.assertTrue(np.any(score_many(impostors, rep) <= HARD_REJECT / 2))

    def test_all_one_members_over_many_groups(self):
        n, groups = 16, 625
        scheme = make_scheme(math.log(2) / n, n, all_one_surjection(n), noiseless_channel())
        accepted = 0
        for _ in range(groups):
            members = (self.rng.random((n, 128)) < scheme.source.activation_prob).astype(int)
            rep = enroll(members, scheme.surjection, scheme=scheme)
            accepted += int(np.sum(score_many(members, rep) > HARD_REJECT / 2))
        self.assertEqual(accepted, n * groups)

    def test_additive_over_blocks(self):
        scheme = make_scheme(0.3, 5, identity_surjection(6), binary_channel(0.1, 0.2))
        rep = enroll(self.rng.integers(0, 2, (5, 120)), scheme.surjection, scheme=scheme)
        q = self.rng.integers(0, 2, 120)
        for k in (1, 37, 119):
            split = score(q[:k], rep.slice(0, k)) + score(q[k:], rep.slice(k, 120))
            self.assertAlmostEqual(score(q, rep), split, places=9)

    def test_dimension_mismatch(self):
        scheme = make_scheme(0.3, 2, identity_surjection(3), noiseless_channel())
        rep = enroll(np.zeros((2, 10), dtype=int), scheme.surjection, scheme=scheme)
        with self.assertRaises(SchemeError):
            score(np.zeros(9, dtype=int), rep)
        with self.assertRaises(SchemeError):
            score(np.full(10, 2), rep)
        with self.assertRaises(SchemeError):
            score(np.zeros(10, dtype=int), enroll(np.zeros((2, 10), dtype=int), scheme.surjection))

    def test_ternary_scheme(self):
        chan = symmetric_channel(3, 0.05, 0.1, 0.02)
        scheme = make_scheme(0.2, 3, identity_surjection(10), chan)
        members = self.rng.choice(3, size=(3, 300), p=[0.6, 0.2, 0.2])
        rep = enroll(members, scheme.surjection, 3, scheme=scheme)
        self.assertGreater(score(members[0], rep), score(self.rng.choice(3, size=300, p=[0.6, 0.2, 0.2]), rep))


class OperatingPointTests(SimpleTestCase):

    def test_ties_hit_the_operating_point(self):
        pfn, tau, achieved, gamma = pfn_at_pfp(np.zeros(50), np.zeros(400), 0.05)
        self.assertEqual(tau, 0.0)
        self.assertAlmostEqual(achieved, 0.05)
        self.assertAlmostEqual(gamma, 0.05)
        self.assertAlmostEqual(pfn, 0.95)

    def test_interpolated_quantile(self):
        pfn, tau, achieved, _ = pfn_at_pfp(np.array([90.0, 95.0, 99.0, 100.0]), np.arange(100.0), 0.05)
        self.assertAlmostEqual(tau, 94.05)
        self.assertAlmostEqual(achieved, 0.05)
        self.assertAlmostEqual(pfn, 0.25)

    def test_insufficient_negatives(self):
        with self.assertRaises(SimulationError):
            pfn_at_pfp(np.zeros(10), np.zeros(19), 0.05)


def sequence_config(**overrides):
    config = {
        'mode': 'sequence', 'n': 8, 'm': 64, 'p': 0.5, 'eta0': 0.2, 'eta1': 0.2,
        'surjection': 'identity', 'groups': 10, 'negatives_per_group': 100, 'runs': 5, 'seed': 11,
    }
    config.update(overrides)
    return config


class VerificationTests(SimpleTestCase):

    def test_threshold_holds_on_fresh_negatives(self):
        sizes = {'groups': 20, 'negatives_per_group': 100, 'runs': 5}
        calibration = run_verification(sequence_config(seed=11, **sizes))
        fresh = run_verification(sequence_config(seed=12, **sizes)).negative_scores
        tau, gamma = calibration.threshold_tau, calibration.tie_weight

        rate = float(np.mean(fresh > tau) + gamma * np.mean(fresh == tau))
        # tau is itself estimated from a binomial sample of the same size
        pfp = calibration.operating_pfp
        sigma = math.sqrt(pfp * (1 - pfp) * (1 / calibration.negative_scores.size + 1 / fresh.size))
        self.assertAlmostEqual(rate, pfp, delta=3 * sigma)

    def test_config_validation(self):
        serializer = VerificationConfigSerializer(data={'mode': 'vector', 'n': 4, 'd': 16})
        self.assertFalse(serializer.is_valid())
        serializer = VerificationConfigSerializer(data={'mode': 'vector', 'n': 4, 'd': 16, 'c': 0.8})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['m'], 128)
        self.assertEqual(serializer.validated_data['runs'], 20)
        self.assertFalse(VerificationConfigSerializer(data=sequence_config(p=0.7)).is_valid())
        self.assertFalse(VerificationConfigSerializer(data=sequence_config(surjection='median')).is_valid())

    def test_reproducible(self):
        first = run_verification(sequence_config(runs=3))
        second = run_verification(sequence_config(runs=3))
        assert_array_equal(first.positive_scores, second.positive_scores)
        assert_array_equal(first.negative_scores, second.negative_scores)
        self.assertEqual(first.pfn_at_pfp, second.pfn_at_pfp)

    def test_runs_are_pooled_in_order(self):
        config = sequence_config(runs=3)
        outcome = run_verification(config)
        first_run, _, _ = simulate_scores(run_verification(config).config, 0)
        assert_array_equal(outcome.positive_scores[:first_run.size], first_run)
        self.assertEqual(outcome.positive_scores.size, 3 * 10 * 8)
        self.assertEqual(outcome.negative_scores.size, 3 * 10 * 100)

    def test_null_scheme(self):
        outcome = run_verification(sequence_config(eta0=0.5, eta1=0.5))
        self.assertAlmostEqual(outcome.pfn_at_pfp, 0.95, delta=1e-12)
        self.assertAlmostEqual(outcome.achieved_pfp, 0.05, delta=1e-12)

    def test_longer_sequences_help(self):
        short = run_verification(sequence_config(m=64))
        long = run_verification(sequence_config(m=128))
        self.assertLess(long.pfn_at_pfp, short.pfn_at_pfp)

    def test_bloom_equivalent_has_no_false_negatives(self):
        n = 16
        outcome = run_verification(sequence_config(
            n=n, m=256, p=math.log(2) / n, eta0=0.0, eta1=0.0, surjection='all1', runs=2,
        ))
        self.assertTrue(np.all(outcome.positive_scores > HARD_REJECT / 2))
        self.assertTrue(np.any(outcome.negative_scores <= HARD_REJECT / 2))

    def test_insufficient_negatives(self):
        with self.assertRaises(SimulationError):
            run_verification(sequence_config(groups=1, negatives_per_group=5, runs=2))

    def test_outcome_histograms(self):
        outcome = run_verification(sequence_config(eta0=0.0, eta1=0.0, runs=2))
        report = outcome.as_dict(bins=256)
        self.assertEqual(len(report['histogram']['edges']), 257)
        for key, scores in [('positive', outcome.positive_scores), ('negative', outcome.negative_scores)]:
            hist = report['histogram'][key]
            self.assertEqual(len(hist['counts']), 256)
            self.assertEqual(sum(hist['counts']) + hist['hard_rejects'], scores.size)
        self.assertGreater(report['histogram']['negative']['hard_rejects'], 0)

    def test_templates_mode_trends(self):
        easy = {
            'mode': 'vector', 'n': 16, 'd': 128, 'c': 0.83, 'surjection': 'identity',
            'groups': 5, 'negatives_per_group': 100, 'runs': 20, 'seed': 5,
        }
        short = run_verification({**easy, 'm': 8 * easy['d']})
        long = run_verification({**easy, 'm': 16 * easy['d']})
        small_groups = run_verification({**easy, 'm': 8 * easy['d'], 'n': 4})
        self.assertLess(long.pfn_at_pfp, short.pfn_at_pfp)
        self.assertLessEqual(small_groups.pfn_at_pfp, short.pfn_at_pfp)

    def test_enrolled_templates_kept(self):
        config = run_verification({
            'mode': 'vector', 'n': 3, 'd': 8, 'c': 0.9, 'm': 64, 'groups': 2, 'negatives_per_group': 20, 'runs': 1,
        }).config
        _, _, templates = simulate_scores(config, 0, keep_templates=True)
        self.assertEqual(templates.shape, (6, 8))
        assert_allclose(np.linalg.norm(templates, axis=1), 1.0)


class ExponentTests(SimpleTestCase):

    def exponent_config(self, **overrides):
        return sequence_config(n=4, eta0=0.0, eta1=0.0, groups=50, negatives_per_group=20, runs=4, **overrides)

    def test_exponent_below_verification(self):
        report = empirical_exponent(self.exponent_config(), [64, 128, 256, 512])
        self.assertGreater(report.slope, 0.5 * report.verification)
        self.assertLessEqual(report.slope, 1.1 * report.verification)
        self.assertEqual(len(report.points), 4)

    def test_useless_scheme_has_zero_exponent(self):
        config = sequence_config(n=4, eta0=0.5, eta1=0.5, groups=20, negatives_per_group=20, runs=2)
        report = empirical_exponent(config, [32, 64, 128])
        self.assertAlmostEqual(report.slope, 0.0, delta=1e-6)

    def test_grid_must_increase(self):
        with self.assertRaises(SimulationError):
            empirical_exponent(self.exponent_config(), [128, 64])
