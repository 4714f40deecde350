import unittest

from permclt.errors import InternalInconsistency, ValidationError
from permclt.verify import (FAIL, PASS, SKIP, SUITE_NAMES, SUITES, SkipCheck, VerifySettings,
                            eulerian_numbers, format_table, run_check, run_suite)


class TestChecks(unittest.TestCase):

    def setUp(self):
        self.settings = VerifySettings(max_n=6)

    def test_every_suite_has_checks(self):
        for name in SUITE_NAMES:
            self.assertTrue(SUITES[name], msg=name)

    def test_exact_suites_pass(self):
        for suite in ("combinatorics", "exactpoly", "oracle"):
            results = run_suite(suite, self.settings)
            self.assertTrue(results)
            for result in results:
                self.assertTrue(result.passed, msg=f"{result.name}: {result.detail}")

    def test_trend_checks_skip_below_their_sizes(self):
        results = run_suite("genfun", self.settings)
        statuses = {result.name: result.status for result in results}
        self.assertIn(SKIP, statuses.values())
        self.assertNotIn(FAIL, statuses.values())

    def test_unknown_suite(self):
        with self.assertRaises(ValidationError):
            run_suite("everything", self.settings)

    def test_outcomes(self):
        def skipped(settings):
            raise SkipCheck("not today")

        def inconsistent(settings):
            raise InternalInconsistency("counts disagree")

        def invalid(settings):
            raise ValidationError("bad input")

        self.assertEqual(run_check("demo", "ok", lambda settings: (True, "fine"), self.settings).status, PASS)
        with self.assertLogs(level="ERROR"):
            failed = run_check("demo", "no", lambda settings: (False, "broken"), self.settings)
        self.assertEqual((failed.status, failed.fatal), (FAIL, False))
        self.assertEqual(run_check("demo", "skip", skipped, self.settings).status, SKIP)
        with self.assertLogs(level="ERROR"):
            fatal = run_check("demo", "fatal", inconsistent, self.settings)
        self.assertEqual((fatal.status, fatal.fatal), (FAIL, True))
        with self.assertLogs(level="ERROR"):
            self.assertFalse(run_check("demo", "invalid", invalid, self.settings).passed)

    def test_format_table(self):
        def later(settings):
            raise SkipCheck("later")

        results = [run_check("demo", "ok", lambda settings: (True, "fine"), self.settings),
                   run_check("demo", "skip", later, self.settings)]
        table = format_table(results)
        self.assertEqual(table.splitlines()[0].split(), ["demo/ok", "PASS", "fine"])
        self.assertEqual(table.splitlines()[1].split(), ["demo/skip", "SKIP", "later"])

    def test_mobius_sums(self):
        result = self.run_named("combinatorics", "mobius sums over divisors", self.settings)
        self.assertEqual((result.status, result.detail), (PASS, "i <= 1000"))

    def run_named(self, suite, name, settings):
        func = dict(SUITES[suite])[name]
        return run_check(suite, name, func, settings)


class TestTrends(unittest.TestCase):

    TREND_CHECKS = [
        ("genfun", "exact m.g.f. of n-cycles approaches its target"),
        ("asymptotics", "common factor approaches its asymptotic form"),
        ("asymptotics", "large-a integral against the exact m.g.f."),
    ]

    def setUp(self):
        self.settings = VerifySettings(max_n=32)

    def test_errors_decrease_over_ncycles(self):
        for suite, name in self.TREND_CHECKS:
            result = run_check(suite, name, dict(SUITES[suite])[name], self.settings)
            self.assertEqual(result.status, PASS, msg=f"{name}: {result.detail}")
            self.assertEqual([field.split(":")[0] for field in result.detail.split(", ")],
                             ["n=8", "n=16", "n=24", "n=32"])


class TestEulerianNumbers(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(eulerian_numbers(1), [0, 1])
        self.assertEqual(eulerian_numbers(3), [0, 1, 4, 1])
        self.assertEqual(eulerian_numbers(4), [0, 1, 11, 11, 1])
