import itertools
import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from scipy import stats

from .channel import apply_channel, binary_channel, noiseless_channel, query_marginal, symmetric_channel
from .exceptions import IntractableTypeSpace, SchemeError, UnverifiableScheme
from .infometrics import (
    asymptotic_kappa,
    binary_entropy,
    build_distributions,
    compactness_C,
    entropy,
    evaluate,
    gaussian_compactness,
    noise_sensitivity,
    noiseless_binary_verification,
    optimal_activation,
    poisson_compactness,
    required_length,
    security_S,
    verification_V,
)
from .models import ProbabilisticSurjection, SourceModel, Surjection
from .source_model import (
    binary_joint_xt,
    build_type_model,
    enumerate_types,
    source_entropy,
    symbol_pmf,
    type_indices,
)
from .surjection import (
    all_one_surjection,
    best_threshold,
    greedy_chain,
    greedy_merge,
    identity_surjection,
    majority_surjection,
    probabilistic_verification,
    surjection_gradient,
    threshold_surjection,
)
from .utils import get_cached_type_model, resolve_surjection


def binary_scheme(p, n, surjection=None, eta0=0.0, eta1=0.0):
    tm = build_type_model(SourceModel(2, p), n)
    r = surjection or identity_surjection(tm.type_count)
    return build_distributions(tm, r, binary_channel(eta0, eta1))


def random_surjection(rng, type_count):
    size = int(rng.integers(1, type_count + 1))
    raw = rng.integers(0, size, type_count)
    _, table = np.unique(raw, return_inverse=True)
    return Surjection(table)


class SourceModelTests(SimpleTestCase):

    def test_symbol_pmf(self):
        assert_allclose(symbol_pmf(SourceModel(2, 0.5)), [0.5, 0.5])
        assert_allclose(symbol_pmf(SourceModel(2, 0.1)), [0.9, 0.1])
        assert_allclose(symbol_pmf(SourceModel(4, 0.1)), [0.7, 0.1, 0.1, 0.1])

    def test_invalid_source_rejected(self):
        with self.assertRaises(SchemeError):
            SourceModel(1, 0.5)
        with self.assertRaises(SchemeError):
            SourceModel(2, 0.6)
        with self.assertRaises(SchemeError):
            SourceModel(3, 0.0)

    def test_binary_type_model(self):
        tm = build_type_model(SourceModel(2, 0.5), 2)
        assert_allclose(tm.pmf, [0.25, 0.5, 0.25])
        self.assertEqual(build_type_model(SourceModel(2, 0.2), 16).type_count, 17)

    def test_ternary_type_model_matches_enumeration(self):
        model = SourceModel(3, 0.2)
        tm = build_type_model(model, 4)
        self.assertEqual(tm.type_count, 15)

        probs = symbol_pmf(model)
        index = {tuple(row): i for i, row in enumerate(tm.types.tolist())}
        brute = np.zeros(tm.type_count)
        brute_joint = np.zeros((3, tm.type_count))
        for symbols in itertools.product(range(3), repeat=4):
            counts = tuple(np.bincount(symbols, minlength=3).tolist())
            weight = np.prod(probs[list(symbols)])
            brute[index[counts]] += weight
            brute_joint[symbols[0], index[counts]] += weight

        assert_allclose(tm.pmf, brute, atol=1e-12)
        assert_allclose(tm.joint_xt, brute_joint, atol=1e-12)

    def test_colex_ordering(self):
        types = enumerate_types(3, 2)
        self.assertEqual(types.tolist()[:3], [[2, 0, 0], [1, 1, 0], [0, 2, 0]])
        self.assertEqual(types.tolist()[-1], [0, 0, 2])
        t = build_type_model(SourceModel(2, 0.3), 5).types
        assert_allclose(t[:, 1], np.arange(6))

    def test_type_model_marginals(self):
        for model, n in [(SourceModel(2, 0.3), 8), (SourceModel(3, 0.25), 6), (SourceModel(5, 0.1), 4)]:
            tm = build_type_model(model, n)
            self.assertAlmostEqual(tm.pmf.sum(), 1.0, delta=1e-12)
            assert_allclose(tm.joint_xt.sum(axis=1), symbol_pmf(model), atol=1e-12)
            assert_allclose(tm.joint_xt.sum(axis=0), tm.pmf, atol=1e-12)

    def test_binary_matches_multinomial(self):
        tm = build_type_model(SourceModel(2, 0.37), 9)
        general = stats.multinomial.pmf(enumerate_types(2, 9), 9, [0.63, 0.37])
        assert_allclose(tm.pmf, general, atol=1e-12)

    def test_enumeration_cap(self):
        with self.assertRaises(IntractableTypeSpace):
            build_type_model(SourceModel(4, 0.1), 50, cap=1000)

    def test_binary_joint_xt(self):
        assert_allclose(binary_joint_xt(0.5, 1), [[0.5, 0.0], [0.0, 0.5]])
        assert_allclose(binary_joint_xt(0.5, 2), [[0.25, 0.25, 0.0], [0.0, 0.25, 0.25]])
        self.assertAlmostEqual(binary_joint_xt(0.3, 8)[1].sum(), 0.3, delta=1e-12)

    def test_type_indices(self):
        seqs = np.array([[0, 1, 2, 1], [0, 1, 0, 2]])
        idx = type_indices(seqs, alphabet_size=3)
        types = enumerate_types(3, 2)
        self.assertEqual(types[idx].tolist(), [[2, 0, 0], [0, 2, 0], [1, 0, 1], [0, 1, 1]])
        assert_allclose(type_indices(np.array([[1, 0, 1], [1, 0, 0]])), [2, 0, 1])

    def test_cached_type_model(self):
        first = get_cached_type_model(2, 0.25, 10)
        second = get_cached_type_model(2, 0.25, 10)
        assert_allclose(first.pmf, second.pmf)
        self.assertEqual(second.group_size, 10)


class ChannelTests(SimpleTestCase):

    def test_binary_channel(self):
        assert_allclose(binary_channel(0.0, 0.0).transition, np.eye(2))
        assert_allclose(binary_channel(0.5, 0.5).transition, [[0.5, 0.5], [0.5, 0.5]])
        assert_allclose(binary_channel(0.1, 0.2).transition, [[0.9, 0.1], [0.2, 0.8]])

    def test_out_of_range_rates(self):
        with self.assertRaises(SchemeError):
            binary_channel(-0.1, 0.0)
        with self.assertRaises(SchemeError):
            binary_channel(0.0, 1.5)

    def test_query_marginal(self):
        model = SourceModel(2, 0.2)
        assert_allclose(query_marginal(model, noiseless_channel()), symbol_pmf(model))
        assert_allclose(query_marginal(SourceModel(2, 0.5), binary_channel(0.1, 0.1)), [0.5, 0.5])
        assert_allclose(query_marginal(model, binary_channel(0.1, 0.3)), [0.78, 0.22])

    def test_alphabet_mismatch(self):
        with self.assertRaises(SchemeError):
            query_marginal(SourceModel(3, 0.2), binary_channel(0.1, 0.1))

    def test_symmetric_channel_structure(self):
        chan = symmetric_channel(4, 0.05, 0.2, 0.03)
        w = chan.transition
        assert_allclose(w.sum(axis=1), np.ones(4), atol=1e-12)
        assert_allclose(w[0, 1:], [0.05] * 3)
        assert_allclose(w[1:, 0], [0.2] * 3)
        self.assertAlmostEqual(w[2, 2], 1.0 - 0.2 - 2 * 0.03)
        assert_allclose(query_marginal(SourceModel(4, 0.1), chan).sum(), 1.0, atol=1e-12)

    def test_uniform_source_stays_uniform(self):
        for eta in (0.0, 0.1, 0.37):
            assert_allclose(query_marginal(SourceModel(2, 0.5), binary_channel(eta, eta)), [0.5, 0.5])

    def test_apply_channel_rates(self):
        rng = np.random.default_rng(3)
        zeros = np.zeros((1, 200_000), dtype=np.int64)
        ones = np.ones((1, 200_000), dtype=np.int64)
        chan = binary_channel(0.1, 0.3)
        self.assertAlmostEqual(apply_channel(zeros, chan, rng).mean(), 0.1, delta=0.005)
        self.assertAlmostEqual(1.0 - apply_channel(ones, chan, rng).mean(), 0.3, delta=0.005)
        assert_allclose(apply_channel(ones, noiseless_channel(), rng), ones)


class SurjectionTests(SimpleTestCase):

    def test_identity(self):
        r = identity_surjection(17)
        self.assertEqual(r.output_symbols, 17)
        assert_allclose(r.table, np.arange(17))
        self.assertEqual(identity_surjection(1).output_symbols, 1)

    def test_identity_matches_raw_types(self):
        tm = build_type_model(SourceModel(2, 0.3), 6)
        dist = build_distributions(tm, identity_surjection(7), noiseless_channel())
        assert_allclose(dist.pxy, tm.joint_xt)

    def test_thresholds(self):
        assert_allclose(threshold_surjection(16, 1).table, [0] + [1] * 16)
        assert_allclose(all_one_surjection(16).table, threshold_surjection(16, 1).table)
        assert_allclose(majority_surjection(15).table, threshold_surjection(15, 8).table)
        assert_allclose(majority_surjection(65).table, (np.arange(66) > 32.5).astype(int))
        with self.assertRaises(SchemeError):
            threshold_surjection(4, 5)

    def test_non_surjective_table_rejected(self):
        with self.assertRaises(SchemeError):
            Surjection(np.array([0, 2, 2]))

    def test_json_round_trip(self):
        r = greedy_merge(build_type_model(SourceModel(2, 0.5), 6), identity_surjection(7), noiseless_channel(), 3)
        assert_allclose(Surjection.from_json(r.to_json()).table, r.table)
        with self.assertRaises(SchemeError):
            Surjection.from_json('{"not": "a list"}')

    def test_json_booleans_rejected(self):
        with self.assertRaises(SchemeError):
            Surjection.from_json('[false, true, true]')
        with self.assertRaises(SchemeError):
            Surjection.from_json('[0, 1, true]')
        self.assertEqual(Surjection.from_json('[0, 1, 1]').output_symbols, 2)

    def test_best_threshold_dense_is_majority(self):
        t, _ = best_threshold(0.5, 15, noiseless_channel())
        self.assertEqual(t, 8)

    def test_best_threshold_sparse_is_all_one(self):
        t, _ = best_threshold(math.log(2) / 16, 16, noiseless_channel())
        self.assertEqual(t, 1)

    def test_best_threshold_matches_exhaustive_search(self):
        cases = [(0.5, 3, noiseless_channel()), (0.2, 6, binary_channel(0.1, 0.05)), (0.35, 10, noiseless_channel())]
        for p, n, chan in cases:
            tm = build_type_model(SourceModel(2, p), n)
            exhaustive = 0.0
            for bits in itertools.product((0, 1), repeat=n + 1):
                if len(set(bits)) < 2:
                    continue
                exhaustive = max(exhaustive, verification_V(build_distributions(tm, Surjection(np.array(bits)), chan)))
            t, v = best_threshold(p, n, chan)
            self.assertAlmostEqual(v, exhaustive, delta=1e-12)
            if (p, n) == (0.5, 3):
                self.assertEqual(t, 2)

    def test_greedy_to_two_symbols(self):
        tm = build_type_model(SourceModel(2, 0.5), 15)
        chan = noiseless_channel()
        identity = identity_surjection(16)
        greedy = greedy_merge(tm, identity, chan, 2)
        v_greedy = verification_V(build_distributions(tm, greedy, chan))
        v_identity = verification_V(build_distributions(tm, identity, chan))
        _, v_major = best_threshold(0.5, 15, chan)

        self.assertEqual(greedy.output_symbols, 2)
        self.assertGreater(v_greedy, 0.0)
        self.assertLessEqual(v_greedy, v_identity + 1e-12)
        self.assertLessEqual(v_greedy, v_major + 1e-12)

    def test_greedy_chain_is_monotone(self):
        tm = build_type_model(SourceModel(2, 0.5), 16)
        chan = binary_channel(0.05, 0.05)
        chain = greedy_chain(tm, chan, [3, 4, 8])
        values = [verification_V(build_distributions(tm, chain[k], chan)) for k in (8, 4, 3)]
        self.assertEqual([chain[k].output_symbols for k in (8, 4, 3)], [8, 4, 3])
        self.assertTrue(all(a >= b - 1e-12 for a, b in zip(values, values[1:])))

    def test_greedy_without_merges(self):
        tm = build_type_model(SourceModel(2, 0.4), 5)
        r = greedy_merge(tm, identity_surjection(6), noiseless_channel(), 6)
        assert_allclose(r.table, np.arange(6))
        with self.assertRaises(SchemeError):
            greedy_merge(tm, identity_surjection(6), noiseless_channel(), 1)

    def test_greedy_output_is_total_and_onto(self):
        tm = build_type_model(SourceModel(3, 0.2), 5)
        r = greedy_merge(tm, identity_surjection(tm.type_count), symmetric_channel(3, 0.05, 0.1), 4)
        self.assertEqual(r.type_count, tm.type_count)
        self.assertEqual(sorted(set(r.table.tolist())), [0, 1, 2, 3])

    def test_data_processing_inequality(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            n = int(rng.integers(1, 10))
            p = float(rng.uniform(0.01, 0.5))
            chan = binary_channel(float(rng.uniform(0, 0.3)), float(rng.uniform(0, 0.3)))
            tm = build_type_model(SourceModel(2, p), n)
            v_types = verification_V(build_distributions(tm, identity_surjection(n + 1), chan))
            v_coarse = verification_V(build_distributions(tm, random_surjection(rng, n + 1), chan))
            self.assertLessEqual(v_coarse, v_types + 1e-12)

    def test_resolve_surjection(self):
        tm = build_type_model(SourceModel(2, 0.5), 15)
        chan = noiseless_channel()
        self.assertEqual(resolve_surjection('majority', tm, chan).output_symbols, 2)
        assert_allclose(resolve_surjection('best', tm, chan).table, majority_surjection(15).table)
        self.assertEqual(resolve_surjection('greedy:4', tm, chan).output_symbols, 4)
        assert_allclose(resolve_surjection('threshold:3', tm, chan).table, threshold_surjection(15, 3).table)
        with self.assertRaises(SchemeError):
            resolve_surjection('bogus', tm, chan)
        with self.assertRaises(SchemeError):
            resolve_surjection('all1', build_type_model(SourceModel(3, 0.2), 3), symmetric_channel(3, 0, 0))


class GradientTests(SimpleTestCase):

    def finite_difference(self, p, n, theta, step=1e-6):
        grad = np.zeros_like(theta)
        for t in range(n + 1):
            up, down = theta.copy(), theta.copy()
            up[t] += step
            down[t] -= step
            grad[t] = (probabilistic_verification(p, n, up) - probabilistic_verification(p, n, down)) / (2 * step)
        return grad

    def test_matches_finite_differences(self):
        theta = np.array([0.2, 0.4, 0.6, 0.8])
        report = surjection_gradient(0.3, 3, ProbabilisticSurjection(theta))
        numeric = self.finite_difference(0.3, 3, theta)
        self.assertFalse(report.diverged)
        self.assertLessEqual(np.linalg.norm(report.gradient - numeric) / np.linalg.norm(numeric), 1e-5)

    def test_random_interior_thetas(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(1, 9))
            p = float(rng.uniform(0.1, 0.5))
            theta = rng.uniform(0.05, 0.95, n + 1)
            report = surjection_gradient(p, n, theta)
            numeric = self.finite_difference(p, n, theta)
            self.assertLessEqual(np.linalg.norm(report.gradient - numeric) / np.linalg.norm(numeric), 1e-5)

    def test_sign_pattern(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = 7
            theta = np.sort(rng.uniform(0.05, 0.95, n + 1))
            report = surjection_gradient(0.4, n, theta)
            self.assertGreater(report.delta, 0.0)
            for t, g in enumerate(report.gradient):
                if abs(t - n * report.k2) > 1e-9:
                    self.assertEqual(np.sign(g), np.sign(t - n * report.k2))

    def test_majority_k2_is_half(self):
        n = 9
        theta = np.where(np.arange(n + 1) >= (n + 1) // 2, 1 - 1e-3, 1e-3)
        self.assertAlmostEqual(surjection_gradient(0.5, n, theta).k2, 0.5, delta=1e-9)

    def test_all_one_diverges(self):
        n = 6
        theta = np.array([0.0] + [1.0] * n)
        report = surjection_gradient(0.1, n, theta)
        self.assertTrue(report.diverged)
        self.assertTrue(np.all(np.isposinf(report.gradient[1:])))
        self.assertLess(report.gradient[0], 0.0)

    def test_last_entry_only(self):
        p, n = 0.3, 4
        theta = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
        report = surjection_gradient(p, n, theta)
        self.assertTrue(report.diverged)
        self.assertFalse(np.any(np.isnan(report.gradient)))
        self.assertTrue(np.all(np.isneginf(report.gradient[:n])))

        step = 1e-6
        lowered = theta.copy()
        lowered[n] -= step
        backward = (probabilistic_verification(p, n, theta) - probabilistic_verification(p, n, lowered)) / step
        self.assertTrue(np.isfinite(report.gradient[n]))
        self.assertAlmostEqual(report.gradient[n], backward, delta=1e-4)

    def test_constant_theta_is_finite(self):
        p, n, step = 0.3, 4, 1e-7
        zeros = surjection_gradient(p, n, np.zeros(n + 1))
        ones = surjection_gradient(p, n, np.ones(n + 1))
        self.assertFalse(zeros.diverged)
        self.assertTrue(np.all(np.isfinite(zeros.gradient)))
        np.testing.assert_allclose(ones.gradient, -zeros.gradient, atol=1e-12)

        for t in range(n + 1):
            raised = np.zeros(n + 1)
            raised[t] = step
            forward = probabilistic_verification(p, n, raised) / step
            self.assertAlmostEqual(zeros.gradient[t], forward, delta=1e-4)

    def test_theta_validation(self):
        with self.assertRaises(SchemeError):
            surjection_gradient(0.3, 3, np.array([0.1, 0.2]))
        with self.assertRaises(SchemeError):
            ProbabilisticSurjection(np.array([0.1, 1.2]))


class InfometricsTests(SimpleTestCase):

    def test_binary_entropy(self):
        self.assertAlmostEqual(binary_entropy(0.5), math.log(2))
        self.assertEqual(binary_entropy(0.0), 0.0)
        self.assertAlmostEqual(binary_entropy(0.1), 0.325083, places=6)

    def test_single_member_reveals_symbol(self):
        dist = binary_scheme(0.3, 1)
        assert_allclose(dist.p1, np.diag([0.7, 0.3]), atol=1e-15)
        self.assertAlmostEqual(verification_V(dist), binary_entropy(0.3), delta=1e-12)
        self.assertAlmostEqual(security_S(dist, SourceModel(2, 0.3)), 0.0, delta=1e-12)

    def test_two_members_dense(self):
        dist = binary_scheme(0.5, 2)
        self.assertAlmostEqual(verification_V(dist), 0.5 * math.log(2), places=6)

    def test_fully_noisy_channel(self):
        self.assertAlmostEqual(verification_V(binary_scheme(0.3, 4, eta0=0.5, eta1=0.5)), 0.0, delta=1e-15)

    def test_inconsistent_distributions(self):
        dist = binary_scheme(0.3, 2)
        broken = type(dist)(py=dist.py, pq=dist.pq, p1=dist.p1, p0=np.outer([1.0, 0.0], dist.py), pxy=dist.pxy)
        with self.assertRaises(SchemeError):
            verification_V(broken)

    def test_closed_form_verification(self):
        rng = np.random.default_rng(2)
        for n in range(1, 13):
            p = float(rng.uniform(0.01, 0.5))
            self.assertAlmostEqual(verification_V(binary_scheme(p, n)), noiseless_binary_verification(p, n), delta=1e-12)

    def test_compactness(self):
        self.assertAlmostEqual(entropy(np.full(4, 0.25)), math.log(4))
        self.assertAlmostEqual(compactness_C(binary_scheme(0.5, 64)), gaussian_compactness(64), delta=0.05)
        alpha = 1.338
        self.assertAlmostEqual(compactness_C(binary_scheme(alpha / 128, 128)), poisson_compactness(alpha), delta=0.05)

    def test_security(self):
        self.assertAlmostEqual(security_S(binary_scheme(0.5, 32), SourceModel(2, 0.5)), math.log(2), delta=0.05)

    def test_noiseless_tradeoff_identities(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 13))
            model = SourceModel(2, float(rng.uniform(1e-3, 0.5)))
            tm = build_type_model(model, n)
            metrics = evaluate(tm, random_surjection(rng, n + 1), noiseless_channel())
            self.assertAlmostEqual(metrics.verification + metrics.security, source_entropy(model), delta=1e-9)
            self.assertLessEqual(metrics.verification, metrics.compactness + 1e-12)
            self.assertGreaterEqual(metrics.security, 0.0)

    def test_non_binary_tradeoff_identity(self):
        model = SourceModel(3, 0.2)
        metrics = evaluate(build_type_model(model, 5), identity_surjection(21), noiseless_channel(3))
        self.assertAlmostEqual(metrics.verification + metrics.security, source_entropy(model), delta=1e-9)

    def test_brute_force_mutual_information(self):
        for n in range(1, 7):
            for eta0, eta1 in itertools.product((0.0, 0.1), repeat=2):
                p = 0.3
                w = binary_channel(eta0, eta1).transition
                joint = np.zeros((2, n + 1))
                for bits in itertools.product((0, 1), repeat=n):
                    prob = np.prod([p if b else 1 - p for b in bits])
                    for q in (0, 1):
                        joint[q, sum(bits)] += prob * w[bits[0], q]
                brute = float(np.sum(joint[joint > 0] * np.log(
                    joint[joint > 0] / np.outer(joint.sum(axis=1), joint.sum(axis=0))[joint > 0]
                )))
                self.assertAlmostEqual(verification_V(binary_scheme(p, n, eta0=eta0, eta1=eta1)), brute, delta=1e-10)

    def test_dense_beats_very_sparse(self):
        for n in range(8, 21):
            self.assertGreater(noiseless_binary_verification(0.5, n), noiseless_binary_verification(0.05, n))

    def test_dense_scaled_verification_decreases_to_half(self):
        scaled = [n * noiseless_binary_verification(0.5, n) for n in range(2, 65)]
        self.assertTrue(all(a > b for a, b in zip(scaled, scaled[1:])))
        self.assertTrue(all(v > 0.5 for v in scaled))

    def test_required_length(self):
        # 64 log(20) / (log 2)^2 = 399.05
        self.assertEqual(required_length(math.log(2) ** 2 / 64, 0.05), 400)
        self.assertEqual(required_length(math.log(2), 0.5), 1)
        with self.assertRaises(UnverifiableScheme):
            required_length(0.0, 0.05)

    def test_asymptotic_constants(self):
        self.assertEqual(asymptotic_kappa('dense_type').kappa, 0.5)
        sparse = asymptotic_kappa('sparse_type')
        self.assertEqual((sparse.alpha, sparse.kappa), (1.338, 0.580))
        self.assertAlmostEqual(asymptotic_kappa('sparse_all1').kappa, 0.480453, places=6)
        self.assertAlmostEqual(asymptotic_kappa('dense_majority').kappa, 1 / math.pi)

    def test_noise_sensitivity_single_point(self):
        tm = build_type_model(SourceModel(2, 0.3), 4)
        points = noise_sensitivity(tm, identity_surjection(5), [0.0])
        self.assertEqual(len(points), 1)
        self.assertAlmostEqual(points[0].verification, noiseless_binary_verification(0.3, 4), delta=1e-12)

    def test_identity_sensitivity_diverges(self):
        tm = build_type_model(SourceModel(2, 0.3), 4)
        slopes = [abs(pt.slope) for pt in noise_sensitivity(tm, identity_surjection(5), [1e-2, 1e-3, 1e-4, 1e-5])]
        self.assertTrue(all(a < b for a, b in zip(slopes, slopes[1:])))
        points = noise_sensitivity(tm, identity_surjection(5), [1e-3, 1e-6])
        self.assertGreater(abs(points[1].slope), abs(points[0].slope))

    def test_majority_sensitivity_bounded(self):
        n = 9
        tm = build_type_model(SourceModel(2, 0.5), n)
        slopes = [abs(pt.slope) for pt in noise_sensitivity(tm, majority_surjection(n), [1e-2, 1e-3, 1e-4, 1e-5])]
        self.assertLessEqual(max(slopes), 2 * min(slopes))


class AsymptoticTests(SimpleTestCase):

    def test_dense_types(self):
        self.assertAlmostEqual(64 * verification_V(binary_scheme(0.5, 64)), 0.5, delta=0.02)

    def test_sparse_optimum(self):
        n = 128
        p_star, v_star = optimal_activation(n, bounds=(0.1 / n, 10.0 / n))
        self.assertAlmostEqual(n * p_star, 1.338, delta=0.07)
        self.assertAlmostEqual(n * v_star, 0.580, delta=0.03)

    def test_majority_vote(self):
        n = 65
        v = verification_V(binary_scheme(0.5, n, majority_surjection(n)))
        self.assertAlmostEqual(n * v, 1 / math.pi, delta=0.03)

    def test_all_one(self):
        n = 128
        v = verification_V(binary_scheme(math.log(2) / n, n, all_one_surjection(n)))
        self.assertAlmostEqual(n * v, math.log(2) ** 2, delta=0.03)

    def test_all_one_optimum_near_log2(self):
        n = 64
        p_star, _ = optimal_activation(n, all_one_surjection(n), bounds=(0.1 / n, 5.0 / n))
        self.assertAlmostEqual(n * p_star, math.log(2), delta=0.1)

    def test_dense_compactness(self):
        tm = build_type_model(SourceModel(2, 0.5), 64)
        self.assertLessEqual(abs(entropy(tm.pmf) - 0.5 * math.log(math.pi * math.e * 64 / 2)), 0.05)
