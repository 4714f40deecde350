import unittest
import math
import os
import tempfile
from fractions import Fraction

import mpmath

from permclt.asymptotics import (AsymptoticParams, ConvergenceBudgets, F_k, G, beta_denominator,
                                 beta_type_integral, common_factor, convergence_report,
                                 f_dominating, gaussian_identity_check, l_decomposition,
                                 l_large_limit, normalize_W, parse_family, quadform, sigma,
                                 target_mgf)
from permclt.combinatorics import CycleType
from permclt.errors import CapExceeded, ValidationError


def lam_of(counts):
    return CycleType.from_counts(counts)


class TestSigma(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(sigma(0).as_tuple(), (Fraction(1, 12), Fraction(1, 24), Fraction(1, 36)))
        self.assertEqual(sigma(1).as_tuple(), (0, 0, 0))
        self.assertEqual(sigma(Fraction(1, 2)).as_tuple(),
                         (Fraction(11, 192), Fraction(11, 384), Fraction(7, 288)))

    def test_float_input(self):
        for exact, approx in zip(sigma(Fraction(1, 4)).as_tuple(), sigma(0.25).as_tuple()):
            self.assertAlmostEqual(float(exact), approx, places=15)

    def test_positive_semidefinite(self):
        for k in range(0, 11):
            m = sigma(Fraction(k, 10))
            self.assertGreaterEqual(m.s11, 0)
            self.assertGreaterEqual(m.s22, 0)
            self.assertGreaterEqual(m.det, 0)

    def test_out_of_range(self):
        with self.assertRaises(ValidationError):
            sigma(Fraction(3, 2))
        with self.assertRaises(ValidationError):
            sigma(-0.1)

    def test_target(self):
        self.assertEqual(quadform(sigma(0), 1, 1), Fraction(7, 36))
        self.assertAlmostEqual(float(target_mgf(0, 1, 1)), math.exp(7 / 72), places=14)
        self.assertEqual(float(target_mgf(1, 3, 2)), 1.0)
        self.assertEqual(l_large_limit(0, 1.0, 2.0), 1.0)

    def test_target_continuity(self):
        for s, r in ((1, 1), (2, 1)):
            near = float(target_mgf(Fraction(999, 1000), s, r))
            self.assertAlmostEqual(near, float(target_mgf(1, s, r)), places=2)


class TestNormalization(unittest.TestCase):

    def test_normalize_W(self):
        self.assertEqual(normalize_W(lam_of({1: 1}), 1, 0), (1.0, 0.0))
        w1, w2 = normalize_W(lam_of({2: 1}), 2, 1)
        self.assertAlmostEqual(w1, 1 / math.sqrt(2))
        self.assertEqual(w2, 0.0)
        self.assertEqual(normalize_W(lam_of({4: 1}), 1, 0), (-0.5, -0.5))

    def test_f_dominating(self):
        self.assertAlmostEqual(f_dominating(4, 1), 0.6851349, delta=1e-7)
        self.assertEqual(f_dominating(1, -2), 0.0)
        for n in (1, 10, 1000):
            self.assertEqual(f_dominating(n, 0), 1.0)

    def test_dominating_inequalities(self):
        for n in (1, 5, 50, 500):
            for k in range(-40, 41):
                z = k / 10
                value = f_dominating(n, z)
                self.assertLessEqual(value, math.exp(-z * z / 2 + z ** 3 / (3 * math.sqrt(n))) * (1 + 1e-12))
                if z <= 0:
                    self.assertLessEqual(value, math.exp(-z * z / 2) * (1 + 1e-12))
        with self.assertRaises(ValidationError):
            f_dominating(0, 1.0)


class TestParams(unittest.TestCase):

    def setUp(self):
        self.params = AsymptoticParams.build(100, 1, 1)

    def test_default_epsilon(self):
        self.assertAlmostEqual(self.params.small_ratio, 0.5)
        self.assertAlmostEqual(self.params.delta, 1e-3)
        self.assertAlmostEqual(self.params.theta, 0.5)

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            AsymptoticParams.build(10, 1, 1, epsilon=1 / (2 * math.e))
        with self.assertRaises(ValidationError):
            AsymptoticParams.build(10, 1, 1, epsilon=0)
        with self.assertRaises(ValidationError):
            AsymptoticParams.build(10, 0, 1)
        with self.assertRaises(ValidationError):
            AsymptoticParams.build(0, 1, 1)

    def test_F_k(self):
        self.assertEqual(F_k(self.params, 1, 0.3), 1.0)
        self.assertAlmostEqual(F_k(self.params, 2, 0.5), 7.5e-4, places=15)
        with self.assertRaises(ValidationError):
            F_k(self.params, 0, 0.5)
        with self.assertRaises(ValidationError):
            F_k(self.params, 2, 1.0)


class TestG(unittest.TestCase):

    def test_no_fixed_points(self):
        params = AsymptoticParams.build(6, 1, 1)
        self.assertEqual(G(params, lam_of({3: 2}), 0.4), 1.0)

    def test_single_fixed_point(self):
        params = AsymptoticParams.build(3, 1, 2)
        expected = math.exp(-1 / (2 * 3 * math.sqrt(3)) - params.delta / 4)
        self.assertAlmostEqual(G(params, lam_of({1: 1, 2: 1}), 0.6), expected, places=14)

    def test_recurrence_matches_partitions(self):
        for counts in ({1: 5, 3: 1}, {1: 12, 4: 2}, {1: 20}):
            lam = lam_of(counts)
            params = AsymptoticParams.build(lam.n, 1, 1)
            for u in (0.0, 0.3, 0.9):
                recurrence = G(params, lam, u)
                partitions = G(params, lam, u, method="partitions")
                self.assertAlmostEqual(recurrence / partitions, 1, places=12)

    def test_partition_cap(self):
        lam = lam_of({1: 5, 3: 1})
        params = AsymptoticParams.build(lam.n, 1, 1)
        with self.assertRaises(CapExceeded):
            G(params, lam, 0.5, method="partitions", partition_cap=4)
        # the cap only binds the partition enumeration
        G(params, lam, 0.5, partition_cap=4)

    def test_invalid(self):
        lam = lam_of({1: 2, 2: 1})
        with self.assertRaises(ValidationError):
            G(AsymptoticParams.build(5, 1, 1), lam, 0.5)
        with self.assertRaises(ValidationError):
            G(AsymptoticParams.build(4, 1, 1), lam, 0.5, method="series")


class TestIntegrals(unittest.TestCase):

    def test_beta_denominator(self):
        self.assertAlmostEqual(float(beta_denominator(AsymptoticParams.build(1, 1, 1))), 1 / 2, places=15)
        self.assertAlmostEqual(float(beta_denominator(AsymptoticParams.build(2, 1, 1))), 1 / 12, places=15)
        self.assertAlmostEqual(float(beta_denominator(AsymptoticParams.build(3, 2, 1))), 1 / 504, places=15)

    def test_quadrature_matches_closed_form(self):
        for n, s, r in ((10, 1, 1), (200, 1, 1), (50, 0.5, 2.0)):
            params = AsymptoticParams.build(n, s, r)
            with mpmath.workdps(30):
                numeric = beta_type_integral(params)
                closed = beta_denominator(params)
                self.assertLess(abs(numeric / closed - 1), 1e-10)

    def test_gaussian_identity(self):
        for alpha in (0.0, 0.3, 0.5, 1.0):
            value, closed = gaussian_identity_check(alpha, 1.0, 2.0)
            self.assertLess(abs(value - closed), 1e-8)
        value, _ = gaussian_identity_check(0.0, 1.0, 1.0)
        self.assertAlmostEqual(value, math.sqrt(2 * math.pi), places=9)
        with self.assertRaises(ValidationError):
            gaussian_identity_check(1.5, 1.0, 1.0)

    def test_small_a_bound(self):
        params = AsymptoticParams.build(30, 1, 1)
        decomposition = l_decomposition(params, lam_of({30: 1}))
        self.assertLess(decomposition.l_small_bound, 1e-8)
        self.assertGreater(decomposition.l_large_numeric, 0)
        self.assertLessEqual(decomposition.l_large_numeric, 1 + 1e-9)

    def test_large_a_with_fixed_points(self):
        lam = lam_of({1: 8, 24: 1})
        params = AsymptoticParams.build(lam.n, 1, 1)
        decomposition = l_decomposition(params, lam)
        self.assertGreater(decomposition.l_large_numeric, 0)
        self.assertEqual(decomposition.epsilon, params.epsilon)

    def test_common_factor_trend(self):
        errors = []
        for n in (16, 64, 256):
            exact, asymptotic = common_factor(AsymptoticParams.build(n, 1, 1))
            errors.append(float(abs(exact / asymptotic - 1)))
        self.assertLess(errors[1], errors[0])
        self.assertLess(errors[2], errors[1])


class TestFamilies(unittest.TestCase):

    def test_builtin(self):
        self.assertEqual(parse_family("ncycle:8,16"), [lam_of({8: 1}), lam_of({16: 1})])
        self.assertEqual(parse_family("fpf-involution:4,6"), [lam_of({2: 2}), lam_of({2: 3})])
        self.assertEqual(parse_family("identity:3"), [lam_of({1: 3})])

    def test_fixed_density(self):
        self.assertEqual(parse_family("fixed-density:1/2:8,3"), [lam_of({1: 4, 4: 1}), lam_of({1: 1, 2: 1})])
        # a lone leftover point becomes fixed
        self.assertEqual(parse_family("fixed-density:3/4:4"), [lam_of({1: 4})])

    def test_malformed(self):
        for spec in ("ncycle:", "ncycle:a", "fpf-involution:5", "fixed-density:2:8",
                     "fixed-density:x:8", "tree:4", "ncycle:0"):
            with self.assertRaises(ValidationError):
                parse_family(spec)

    def test_file(self):
        with tempfile.NamedTemporaryFile('w', suffix=".txt", delete=False) as f:
            f.write("# two classes\n3^1\n\n1^2 2^1\n")
        try:
            self.assertEqual(parse_family(f"file:{f.name}"), [lam_of({3: 1}), lam_of({1: 2, 2: 1})])
        finally:
            os.unlink(f.name)

    def test_missing_file(self):
        with self.assertLogs(level='CRITICAL'):
            with self.assertRaises(FileNotFoundError):
                parse_family("file:/nonexistent/permclt-family.txt")


class TestConvergence(unittest.TestCase):

    def test_identity_family(self):
        rows = convergence_report(parse_family("identity:4,16"), 1.0, 1.0)
        self.assertEqual([row.source for row in rows], ["exact", "exact"])
        for row in rows:
            self.assertEqual(row.target, 1.0)
            self.assertAlmostEqual(row.mgf, math.exp(-1 / math.sqrt(row.n)), places=14)
            self.assertAlmostEqual(row.err_times_n16, row.abs_err * row.n ** (1 / 6))
            self.assertFalse(row.growth_flag)

    def test_sampled_rows(self):
        budgets = ConvergenceBudgets(exact_max_n=8, samples=2000, seed=4)
        rows = convergence_report(parse_family("ncycle:8,40"), 1.0, 1.0, budgets)
        self.assertEqual([row.source for row in rows], ["exact", "sampled"])
        self.assertEqual(rows[0].stderr, 0.0)
        self.assertGreater(rows[1].stderr, 0.0)
        self.assertIsNotNone(rows[0].mgf_large_a)
        self.assertIsNone(rows[1].mgf_large_a)
        self.assertIsNone(rows[1].small_a_bound)

    def test_a_sum_split(self):
        rows = convergence_report(parse_family("ncycle:8,16,24,32"), 1.0, 1.0)
        errors = [abs(row.mgf_large_a - row.mgf) / row.mgf for row in rows]
        self.assertLess(errors[0], 0.1)
        for earlier, later in zip(errors, errors[1:]):
            self.assertLess(later, earlier)
        for row in rows:
            # default cut: 2e(s+r)epsilon/r = 1/2
            self.assertAlmostEqual(row.small_a_bound, math.sqrt(row.n) * 0.5 ** (row.n + 1), places=15)

    def test_a_sum_split_follows_epsilon(self):
        family = parse_family("ncycle:12")
        default = convergence_report(family, 1.0, 1.0)[0]
        narrow = convergence_report(family, 1.0, 1.0, ConvergenceBudgets(epsilon=0.02))[0]
        self.assertEqual(narrow.mgf, default.mgf)
        self.assertLess(narrow.small_a_bound, default.small_a_bound)
        self.assertNotEqual(narrow.mgf_large_a, default.mgf_large_a)
        with self.assertRaises(ValidationError):
            convergence_report(family, 1.0, 1.0, ConvergenceBudgets(epsilon=0.5))

    def test_invalid_family(self):
        with self.assertRaises(ValidationError):
            convergence_report([], 1.0, 1.0)
        with self.assertRaises(ValidationError):
            convergence_report(parse_family("ncycle:16,8"), 1.0, 1.0)
