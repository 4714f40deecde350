import unittest
import math
from fractions import Fraction

from permclt.combinatorics import (CycleType, centering, class_size, divisors, mobius,
                                   partitions_of)
from permclt.errors import ValidationError


class TestCycleType(unittest.TestCase):

    def test_from_counts(self):
        lam = CycleType.from_counts({1: 2, 3: 1})
        self.assertEqual(lam.n, 5)
        self.assertEqual(lam[1], 2)
        self.assertEqual(lam[2], 0)
        self.assertEqual(lam[3], 1)
        self.assertEqual(lam[7], 0)
        self.assertEqual(lam.fixed_points, 2)
        self.assertEqual(lam.alpha1, Fraction(2, 5))
        self.assertEqual(lam.cycle_lengths(), [3, 1, 1])

    def test_identity(self):
        self.assertTrue(CycleType.from_counts({1: 4}).is_identity)
        self.assertEqual(CycleType.from_counts({1: 4}).alpha1, 1)
        self.assertFalse(CycleType.from_counts({1: 2, 2: 1}).is_identity)

    def test_inconsistent_vector(self):
        with self.assertRaises(ValidationError):
            CycleType((0, 1, 0))
        with self.assertRaises(ValidationError):
            CycleType((-1,))
        with self.assertRaises(ValidationError):
            CycleType.from_counts({0: 1})

    def test_parse_factors(self):
        self.assertEqual(CycleType.parse("1^2 3^1"), CycleType.from_counts({1: 2, 3: 1}))
        self.assertEqual(CycleType.parse("  4 "), CycleType.from_counts({4: 1}))

    def test_parse_json(self):
        self.assertEqual(CycleType.parse("[[1, 2], [3, 1]]"), CycleType.from_counts({1: 2, 3: 1}))

    def test_parse_round_trip(self):
        for n in range(1, 7):
            for lam in partitions_of(n):
                self.assertEqual(CycleType.parse(lam.to_text()), lam)
                self.assertEqual(CycleType.parse(lam.to_json()), lam)

    def test_parse_malformed(self):
        for text in ("1^x", "a", "2^1 2^1", "[[1, 2], [3]]", "[[0, 1]]"):
            with self.assertRaises(ValidationError):
                CycleType.parse(text)


class TestClassSize(unittest.TestCase):

    def test_small_classes(self):
        self.assertEqual(class_size(CycleType.from_counts({1: 3})), 1)
        self.assertEqual(class_size(CycleType.from_counts({3: 1})), 2)
        self.assertEqual(class_size(CycleType.from_counts({1: 1, 2: 1})), 3)
        self.assertEqual(class_size(CycleType(())), 1)

    def test_sizes_sum_to_factorial(self):
        for n in range(0, 10):
            sizes = [class_size(lam) for lam in partitions_of(n)]
            self.assertEqual(sum(sizes), math.factorial(n))
            for size in sizes:
                self.assertGreaterEqual(size, 1)
                self.assertEqual(math.factorial(n) % size, 0)


class TestPartitions(unittest.TestCase):

    def test_counts(self):
        self.assertEqual(partitions_of(0), [CycleType(())])
        self.assertEqual(len(partitions_of(5)), 7)
        self.assertEqual(len(partitions_of(8)), 22)
        self.assertEqual(len(partitions_of(20)), 627)

    def test_no_duplicates(self):
        for n in range(1, 12):
            classes = partitions_of(n)
            self.assertEqual(len(classes), len(set(classes)))
            for lam in classes:
                self.assertEqual(lam.n, n)

    def test_negative(self):
        with self.assertRaises(ValidationError):
            partitions_of(-1)


class TestNumberTheory(unittest.TestCase):

    def test_mobius(self):
        self.assertEqual(mobius(1), 1)
        self.assertEqual(mobius(2), -1)
        self.assertEqual(mobius(4), 0)
        self.assertEqual(mobius(6), 1)
        self.assertEqual(mobius(30), -1)

    def test_mobius_sum(self):
        for i in range(1, 1001):
            self.assertEqual(sum(mobius(d) for d in divisors(i)), 1 if i == 1 else 0)

    def test_divisors(self):
        self.assertEqual(divisors(1), (1,))
        self.assertEqual(divisors(6), (1, 2, 3, 6))
        self.assertEqual(divisors(36), (1, 2, 3, 4, 6, 9, 12, 18, 36))

    def test_invalid(self):
        with self.assertRaises(ValidationError):
            mobius(0)
        with self.assertRaises(ValidationError):
            divisors(-3)

    def test_centering(self):
        self.assertEqual(centering(4, Fraction(0)), (2, 4))
        self.assertEqual(centering(3, Fraction(1)), (0, 0))
        self.assertEqual(centering(4, Fraction(1, 2)), (Fraction(3, 2), 3))
