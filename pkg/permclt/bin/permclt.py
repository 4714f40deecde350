import argparse
import logging
from typing import List, Optional

from permclt import run
from permclt.config import DEFAULTS, build_run_config, load_config
from permclt.errors import InternalInconsistency, PermcltError
from permclt.utils import PRECISION_ENV, configure_logging
from permclt.verify import SUITE_NAMES

DEFAULT_LOGLEVEL = "INFO"


def builtin(key: str) -> str:
    return f"config key {key}, built-in default {DEFAULTS[key] or 'computed'}"


def add_lambda(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lam", required=True,
            help='Cycle type, e.g. "1^2 3^1" (two fixed points and a 3-cycle) or JSON [[1, 2], [3, 1]]')


def add_format(parser: argparse.ArgumentParser, text: bool = False) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--json", dest="format", action="store_const", const="json",
            help="JSON output (default)" if not text else "JSON output")
    group.add_argument("--csv", dest="format", action="store_const", const="csv", help="CSV output")
    if text:
        group.add_argument("--text", dest="format", action="store_const", const="text",
                help="Plain pass/fail table (default)")
        parser.set_defaults(format="text")
    parser.add_argument("-o", "--output", help="Write the artifact to this file instead of stdout")


def add_point(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--s", type=float, required=required, help="m.g.f. is evaluated at (-s, -r), s > 0")
    parser.add_argument("--r", type=float, required=required, help="m.g.f. is evaluated at (-s, -r), r > 0")


def add_sampling(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--samples", type=int, help=f"Number of draws ({builtin('samples')})")
    parser.add_argument("--seed", type=int, help=f"RNG seed ({builtin('seed')})")
    parser.add_argument("--workers", type=int, help=f"Worker processes ({builtin('workers')})")
    parser.add_argument("--streams", type=int,
            help=f"Independent RNG streams, 0 for one per worker ({builtin('streams')})")
    parser.add_argument("--rng", help=f"numpy bit generator ({builtin('rng')})")


def add_precision(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--precision", type=int,
            help=f"Working precision in decimal digits (${PRECISION_ENV}, else 30)")


def build_parser() -> argparse.ArgumentParser:
    formatter = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(formatter_class=formatter,
            description="Joint distribution of descent number and major index on conjugacy "
                        "classes of the symmetric group, and its central limit theorem")
    parser.add_argument("-c", "--config", help="INI configuration file with a [permclt] section")
    parser.add_argument("-l", "--loglevel",
            choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
            help=f"Log level ({builtin('loglevel')})")
    subparsers = parser.add_subparsers(dest="command", required=True)

    exact = subparsers.add_parser("exact", formatter_class=formatter,
            help="Exact generating function of (d, maj) over a class")
    add_lambda(exact)
    exact.add_argument("--q1", action="store_true", help="Only the q = 1 specialization, in t")
    add_format(exact)

    oracle = subparsers.add_parser("oracle", formatter_class=formatter,
            help="Brute-force (d, maj) table of a small class")
    add_lambda(oracle)
    oracle.add_argument("--oracle-cap", dest="oracle_cap", type=int,
            help=f"Largest n enumerated ({builtin('oracle_cap')}, hard cap 11)")
    add_format(oracle)

    sample = subparsers.add_parser("sample", formatter_class=formatter,
            help="Monte Carlo moments and m.g.f. estimates of W over a class")
    add_lambda(sample)
    add_sampling(sample)
    sample.add_argument("--grid", help='m.g.f. points "s1,r1;s2,r2"')
    add_format(sample)

    mgf = subparsers.add_parser("mgf", formatter_class=formatter,
            help="Exact m.g.f. of W at (-s, -r) against its limit")
    add_lambda(mgf)
    add_point(mgf)
    add_precision(mgf)
    add_format(mgf)

    sigma = subparsers.add_parser("sigma", formatter_class=formatter,
            help="Limiting covariance matrix for a fixed-point density")
    sigma.add_argument("--alpha", required=True, help="Fixed-point density in [0, 1], e.g. 0 or 1/2")
    add_point(sigma, required=False)
    add_precision(sigma)
    add_format(sigma)

    converge = subparsers.add_parser("converge", formatter_class=formatter,
            help="m.g.f. convergence report along a family of classes")
    converge.add_argument("--family", required=True,
            help="ncycle:8,16 | fpf-involution:100,400 | identity:4,8 | "
                 "fixed-density:<alpha>:16,32 | file:<path>")
    add_point(converge)
    add_sampling(converge)
    converge.add_argument("--exact-max-n", dest="exact_max_n", type=int,
            help=f"Largest n computed exactly, sampled above ({builtin('exact_max_n')})")
    converge.add_argument("--epsilon", type=float, help=f"Cut of the a-sum ({builtin('epsilon')})")
    add_precision(converge)
    add_format(converge)

    verify = subparsers.add_parser("verify", formatter_class=formatter,
            help="Run the invariant suites and print a pass/fail table")
    verify.add_argument("--suite", choices=list(SUITE_NAMES) + ["all"], default="all")
    verify.add_argument("--max-n", dest="max_n", type=int, default=8,
            help="Largest n of the exact checks")
    add_sampling(verify)
    verify.add_argument("--oracle-cap", dest="oracle_cap", type=int,
            help=f"Largest n enumerated ({builtin('oracle_cap')}, hard cap 11)")
    verify.add_argument("--epsilon", type=float, help=f"Cut of the a-sum ({builtin('epsilon')})")
    add_precision(verify)
    add_format(verify, text=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    # Log at the default level until the configuration is read
    logging.basicConfig(level=DEFAULT_LOGLEVEL)

    args = build_parser().parse_args(argv)

    try:
        config = load_config(args.config)
        if args.loglevel:
            configure_logging(args.loglevel)
        else:
            configure_logging(config.get('permclt', 'loglevel', fallback=DEFAULT_LOGLEVEL))
        return run(build_run_config(args, config))
    except InternalInconsistency as e:
        logging.critical("Internal inconsistency, please report it: %s", e)
        return 3
    except (PermcltError, ValueError, OSError) as e:
        # ValidationError, QuadratureError, PrecisionBudgetExceeded, bad config or unreadable file
        logging.error("%s", e)
        return 2
