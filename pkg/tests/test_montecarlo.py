import unittest
import os
import math

import numpy as np

from permclt.combinatorics import CycleType, centering, class_size
from permclt.errors import ValidationError
from permclt.montecarlo import (SampleStats, batch_size, batch_statistics, chi_square_uniformity,
                                make_generator, normalized_moments, run_sampling, sample_batch,
                                sample_permutation, split_quota)
from permclt.oracle import cycle_type_of, descent_number, major_index, Permutation


def lam_of(counts):
    return CycleType.from_counts(counts)


class TestSampler(unittest.TestCase):

    def setUp(self):
        self.rng = make_generator(np.random.SeedSequence(1))

    def test_membership(self):
        for counts in ({1: 1}, {2: 1}, {1: 2, 3: 1}, {2: 3}, {5: 1, 4: 2}):
            lam = lam_of(counts)
            for _ in range(20):
                self.assertEqual(cycle_type_of(sample_permutation(lam, self.rng)), lam)

    def test_batch_membership(self):
        lam = lam_of({1: 3, 2: 1, 4: 2})
        batch = sample_batch(lam, 200, self.rng)
        self.assertEqual(batch.shape, (200, lam.n))
        for row in batch:
            self.assertEqual(cycle_type_of(Permutation(tuple(int(v) for v in row))), lam)

    def test_batch_statistics(self):
        batch = np.array([[1, 2, 3], [3, 2, 1], [2, 3, 1]])
        d, maj = batch_statistics(batch)
        self.assertEqual(d.tolist(), [1, 3, 2])
        self.assertEqual(maj.tolist(), [0, 3, 2])
        for row, di, mi in zip(batch, d, maj):
            p = Permutation(tuple(int(v) for v in row))
            self.assertEqual((descent_number(p), major_index(p)), (di, mi))

    def test_uniformity(self):
        lam = lam_of({1: 1, 3: 1})
        self.assertEqual(class_size(lam), 8)
        _, p = chi_square_uniformity(lam, 20000, seed=3)
        self.assertGreater(p, 1e-6)

    def test_singleton_class(self):
        self.assertEqual(chi_square_uniformity(lam_of({1: 4}), 50), (0.0, 1.0))

    def test_unsupported_generator(self):
        with self.assertRaises(ValidationError):
            make_generator(np.random.SeedSequence(0), "Xorshift")


class TestSampleStats(unittest.TestCase):

    def test_transposition(self):
        lam = lam_of({2: 1})
        stats = run_sampling(lam, 100, grid=[(1.0, 1.0)], seed=5)
        self.assertEqual(stats.count, 100)
        self.assertEqual(stats.mean_d, 2)
        self.assertEqual(stats.mean_maj, 1)
        moments = normalized_moments(stats)
        self.assertEqual(moments.cov_W, (0.0, 0.0, 0.0))
        self.assertEqual(moments.correlation, 0.0)
        self.assertAlmostEqual(stats.mgf_means()[0], math.exp(-1 / math.sqrt(2)), places=12)
        self.assertAlmostEqual(stats.mgf_stderrs()[0], 0.0, places=12)

    def test_identity(self):
        lam = lam_of({1: 6})
        stats = run_sampling(lam, 10, seed=5)
        center_d, center_maj = centering(6, lam.alpha1)
        self.assertEqual(stats.mean_d, 1)
        self.assertEqual(stats.mean_maj, 0)
        moments = normalized_moments(stats)
        self.assertAlmostEqual(moments.mean_W[0], float(1 - center_d) / math.sqrt(6))
        self.assertAlmostEqual(moments.mean_W[1], float(-center_maj) / 6 ** 1.5)

    def test_merge(self):
        lam = lam_of({3: 2})
        rng = make_generator(np.random.SeedSequence(11))
        first, second = SampleStats(lam, [(1.0, 2.0)]), SampleStats(lam, [(1.0, 2.0)])
        first.add(*batch_statistics(sample_batch(lam, 40, rng)))
        second.add(*batch_statistics(sample_batch(lam, 60, rng)))
        merged = first.merge(second)
        self.assertEqual(merged.count, 100)
        self.assertEqual(merged.sum_d, first.sum_d + second.sum_d)
        self.assertEqual(merged.sum_dmaj, first.sum_dmaj + second.sum_dmaj)
        with self.assertRaises(ValidationError):
            first.merge(SampleStats(lam, [(1.0, 1.0)]))

    def test_merge_mgf(self):
        lam = lam_of({3: 2})
        rng = make_generator(np.random.SeedSequence(11))
        batches = [batch_statistics(sample_batch(lam, size, rng)) for size in (40, 60)]
        first, second, both = (SampleStats(lam, [(1.0, 2.0)]) for _ in range(3))
        first.add(*batches[0])
        second.add(*batches[1])
        for batch in batches:
            both.add(*batch)
        merged = first.merge(second)
        d = np.concatenate([batch[0] for batch in batches])
        maj = np.concatenate([batch[1] for batch in batches])
        center_d, center_maj = centering(6, lam.alpha1)
        values = np.exp(-(d - float(center_d)) / math.sqrt(6) - 2 * (maj - float(center_maj)) / 6 ** 1.5)
        expected_stderr = float(values.std(ddof=1)) / math.sqrt(100)
        for stats in (merged, both):
            self.assertAlmostEqual(stats.mgf_means()[0], float(values.mean()), places=12)
            self.assertAlmostEqual(stats.mgf_stderrs()[0], expected_stderr, places=12)

    def test_constant_mgf_has_no_spread(self):
        stats = SampleStats(lam_of({2: 1}), [(1.0, 1.0), (3.0, 0.5)])
        for size in (1, 999, 100000):
            stats.add(np.full(size, 2, dtype=np.int64), np.full(size, 1, dtype=np.int64))
        self.assertEqual(stats.count, 101000)
        for stderr in stats.mgf_stderrs():
            self.assertAlmostEqual(stderr, 0.0, places=15)

    def test_not_enough_samples(self):
        stats = SampleStats(lam_of({3: 1}), [(1.0, 1.0)])
        with self.assertRaises(ValidationError):
            stats.mgf_means()
        with self.assertRaises(ValidationError):
            normalized_moments(stats)

    def test_quota(self):
        self.assertEqual(split_quota(10, 3), [4, 3, 3])
        self.assertEqual(split_quota(2, 4), [1, 1, 0, 0])
        self.assertEqual(batch_size(10, 100), 10)
        self.assertEqual(batch_size(10, 1), 1)


class TestRunSampling(unittest.TestCase):

    def setUp(self):
        self.lam = lam_of({1: 2, 5: 2})
        self.grid = [(1.0, 1.0), (0.5, 2.0)]

    def assertSameStats(self, a, b):
        self.assertEqual((a.count, a.sum_d, a.sum_maj, a.sum_d2, a.sum_maj2, a.sum_dmaj),
                         (b.count, b.sum_d, b.sum_maj, b.sum_d2, b.sum_maj2, b.sum_dmaj))
        self.assertEqual(a.mgf_mean, b.mgf_mean)
        self.assertEqual(a.mgf_m2, b.mgf_m2)

    def test_repeatable(self):
        a = run_sampling(self.lam, 2000, self.grid, seed=9)
        b = run_sampling(self.lam, 2000, self.grid, seed=9)
        self.assertSameStats(a, b)

    def test_independent_of_workers(self):
        one = run_sampling(self.lam, 5000, self.grid, seed=9, workers=1, streams=3, batch_elements=700)
        two = run_sampling(self.lam, 5000, self.grid, seed=9, workers=2, streams=3, batch_elements=700)
        self.assertSameStats(one, two)
        self.assertEqual(one.count, 5000)

    def test_invalid_arguments(self):
        with self.assertRaises(ValidationError):
            run_sampling(self.lam, 0)
        with self.assertRaises(ValidationError):
            run_sampling(self.lam, 10, workers=0)
        with self.assertRaises(ValidationError):
            run_sampling(self.lam, 10, grid=[(0.0, 1.0)])
        with self.assertRaises(ValidationError):
            run_sampling(self.lam, 10, rng_name="Xorshift")
        with self.assertRaises(ValidationError):
            run_sampling(CycleType(()), 10)

    def test_ncycle_moments(self):
        n = 400
        moments = normalized_moments(run_sampling(lam_of({n: 1}), 20000, seed=2))
        w11, w12, w22 = moments.cov_W
        self.assertAlmostEqual(w11 / (1 / 12), 1, delta=0.05)
        self.assertAlmostEqual(w22 / (1 / 36), 1, delta=0.05)
        self.assertAlmostEqual(w12 / (1 / 24), 1, delta=0.1)
        self.assertAlmostEqual(moments.correlation, math.sqrt(3) / 2, delta=0.05)

    @unittest.skipUnless(os.environ.get("PERMCLT_SLOW"), "set PERMCLT_SLOW=1 for full-scale sampling")
    def test_involution_moments_full_scale(self):
        n = 4000
        moments = normalized_moments(run_sampling(lam_of({2: n // 2}), 10 ** 6, seed=2, workers=4))
        w11, w12, w22 = moments.cov_W
        self.assertAlmostEqual(w11 / (1 / 12), 1, delta=0.02)
        self.assertAlmostEqual(w12 / (1 / 24), 1, delta=0.02)
        self.assertAlmostEqual(w22 / (1 / 36), 1, delta=0.02)
        self.assertAlmostEqual(moments.mean_W[0], 0, delta=0.05)

    @unittest.skipUnless(os.environ.get("PERMCLT_SLOW"), "set PERMCLT_SLOW=1 for full-scale sampling")
    def test_ncycle_moments_full_scale(self):
        n = 4000
        moments = normalized_moments(run_sampling(lam_of({n: 1}), 10 ** 6, seed=3, workers=4))
        w11, w12, w22 = moments.cov_W
        self.assertAlmostEqual(w11 / (1 / 12), 1, delta=0.02)
        self.assertAlmostEqual(w12 / (1 / 24), 1, delta=0.02)
        self.assertAlmostEqual(w22 / (1 / 36), 1, delta=0.02)
        self.assertAlmostEqual(moments.correlation, math.sqrt(3) / 2, delta=0.02)
