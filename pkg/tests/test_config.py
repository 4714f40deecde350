import unittest
import os
import tempfile

from permclt.bin.permclt import build_parser
from permclt.config import DEFAULTS, build_run_config, load_config, parse_grid
from permclt.errors import ValidationError

SAMPLE_CONFIG = """
[permclt]
loglevel = WARNING
seed = 7
workers = 2
samples = 5000
precision = 40
epsilon = 0.01
"""


def write_config(text):
    with tempfile.NamedTemporaryFile('w', suffix=".ini", delete=False) as f:
        f.write(text)
    return f.name


class TestLoadConfig(unittest.TestCase):

    def setUp(self):
        self.filename = write_config(SAMPLE_CONFIG)

    def tearDown(self):
        os.unlink(self.filename)

    def test_defaults(self):
        config = load_config()
        for key, value in DEFAULTS.items():
            self.assertEqual(config.get('permclt', key), value)

    def test_file_overrides_defaults(self):
        config = load_config(self.filename)
        self.assertEqual(config.getint('permclt', 'seed'), 7)
        self.assertEqual(config.get('permclt', 'loglevel'), "WARNING")
        self.assertEqual(config.get('permclt', 'rng'), "PCG64")

    def test_missing_file(self):
        with self.assertLogs(level='CRITICAL'):
            with self.assertRaises(FileNotFoundError):
                load_config("/nonexistent/permclt.ini")

    def test_unknown_key(self):
        filename = write_config("[permclt]\nseeed = 3\n")
        try:
            with self.assertRaises(ValueError):
                load_config(filename)
        finally:
            os.unlink(filename)

    def test_unknown_section(self):
        filename = write_config("[permclt]\nseed = 3\n[sampling]\nseed = 4\n")
        try:
            with self.assertRaises(ValueError):
                load_config(filename)
        finally:
            os.unlink(filename)

    def test_badly_typed_value(self):
        filename = write_config("[permclt]\nworkers = many\n")
        try:
            with self.assertRaises(ValueError):
                load_config(filename)
        finally:
            os.unlink(filename)


class TestGrid(unittest.TestCase):

    def test_parse(self):
        self.assertEqual(parse_grid("1,1;0.5,2"), ((1.0, 1.0), (0.5, 2.0)))
        self.assertEqual(parse_grid("1,2;"), ((1.0, 2.0),))
        self.assertEqual(parse_grid(""), ())

    def test_malformed(self):
        for text in ("1", "1,2,3", "a,b", "0,1", "1,-1"):
            with self.assertRaises(ValidationError):
                parse_grid(text)


class TestRunConfig(unittest.TestCase):

    def setUp(self):
        self.filename = write_config(SAMPLE_CONFIG)
        self.parser = build_parser()

    def tearDown(self):
        os.unlink(self.filename)

    def test_config_values(self):
        args = self.parser.parse_args(["sample", "--lambda", "3^1", "--grid", "1,1"])
        config = build_run_config(args, load_config(self.filename))
        self.assertEqual(config.subcommand, "sample")
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.workers, 2)
        self.assertEqual(config.effective_streams, 2)
        self.assertEqual(config.samples, 5000)
        self.assertEqual(config.precision, 40)
        self.assertEqual(config.epsilon, 0.01)
        self.assertEqual(config.grid, ((1.0, 1.0),))

    def test_flags_win(self):
        args = self.parser.parse_args(["sample", "--lambda", "3^1", "--seed", "11", "--samples", "10",
                                       "--streams", "4"])
        config = build_run_config(args, load_config(self.filename))
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.samples, 10)
        self.assertEqual(config.effective_streams, 4)

    def test_builtin_defaults(self):
        args = self.parser.parse_args(["mgf", "--lambda", "4^1", "--s", "1", "--r", "2", "--csv"])
        config = build_run_config(args, load_config())
        self.assertEqual(config.seed, 42)
        self.assertEqual(config.output_format, "csv")
        self.assertIsNone(config.epsilon)
        self.assertAlmostEqual(config.resolved_epsilon(), 2 / (4 * 2.718281828459045 * 3))

    def test_echo(self):
        args = self.parser.parse_args(["sample", "--lambda", "3^1", "--grid", "1,1;2,1"])
        echo = build_run_config(args, load_config(self.filename)).echo()
        self.assertEqual(echo["subcommand"], "sample")
        self.assertEqual(echo["lambda"], "3^1")
        self.assertEqual(echo["grid"], [[1.0, 1.0], [2.0, 1.0]])
        self.assertEqual(echo["streams"], 2)
        self.assertNotIn("oracle_cap", echo)

    def test_echo_verify(self):
        args = self.parser.parse_args(["verify", "--suite", "oracle", "--max-n", "6"])
        config = build_run_config(args, load_config())
        echo = config.echo()
        self.assertEqual(config.output_format, "text")
        self.assertEqual((echo["suite"], echo["max_n"]), ("oracle", 6))
        self.assertIn("oracle_cap", echo)
