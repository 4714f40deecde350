import argparse
import configparser
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from permclt.errors import ValidationError
from permclt.utils import DEFAULT_MAX_PRECISION, default_precision

SECTION = "permclt"

# Every key accepted in the [permclt] section, with its default
DEFAULTS: Dict[str, str] = {
    "loglevel": "INFO",
    "precision": "",  # empty: $PERMCLT_PRECISION, else 30
    "max_precision": str(DEFAULT_MAX_PRECISION),
    "seed": "42",
    "workers": "1",
    "streams": "0",  # 0: one stream per worker
    "rng": "PCG64",
    "batch_elements": "1000000",
    "oracle_cap": "9",
    "partition_cap": "60",
    "quad_epsabs": "1e-12",
    "quad_epsrel": "1e-10",
    "quad_limit": "200",
    "exact_max_n": "32",
    "epsilon": "",  # empty: r / (4e(s+r))
    "samples": "100000",
}

INT_KEYS = ["max_precision", "seed", "workers", "streams", "batch_elements", "oracle_cap",
            "partition_cap", "quad_limit", "exact_max_n", "samples"]
FLOAT_KEYS = ["quad_epsabs", "quad_epsrel"]


def load_config(filename: Optional[str] = None) -> configparser.ConfigParser:
    """
    Load configuration using configparser on top of the built-in defaults
    and check that every key is known and well typed
    """
    config = configparser.ConfigParser(
            converters={'list': lambda x: [i.strip() for i in x.split(',')]}
    )
    config.read_dict({SECTION: DEFAULTS})
    if filename is not None:
        try:
            with open(filename, "r") as fd:
                config.read_file(fd)
        except FileNotFoundError as e:
            logging.critical("Config file %s does not exist: %s", filename, e)
            raise

    for section in config.sections():
        if section != SECTION:
            raise ValueError(f"Unknown section [{section}] in config file, only [{SECTION}] is read")
    for key in config[SECTION]:
        if key not in DEFAULTS:
            raise ValueError(f"Unknown key {key} in section {SECTION} of config file")
    for key in INT_KEYS:
        config.getint(SECTION, key)
    for key in FLOAT_KEYS:
        config.getfloat(SECTION, key)
    if config.get(SECTION, "epsilon"):
        config.getfloat(SECTION, "epsilon")
    return config


def parse_grid(text: str) -> Tuple[Tuple[float, float], ...]:
    """
    "s1,r1;s2,r2" -> ((s1, r1), (s2, r2))
    """
    points = []
    for chunk in text.split(';'):
        if not chunk.strip():
            continue
        try:
            s, r = (float(x) for x in chunk.split(','))
        except ValueError:
            raise ValidationError(f"Malformed grid point {chunk!r}, expected \"s,r\"")
        if s <= 0 or r <= 0:
            raise ValidationError(f"Grid points need s, r > 0, got {chunk!r}")
        points.append((s, r))
    return tuple(points)


@dataclass(frozen=True)
class RunConfig:
    """
    Fully resolved settings of one invocation. echo() is embedded verbatim
    in every output artifact.
    """
    subcommand: str
    lam: Optional[str] = None
    family: Optional[str] = None
    s: Optional[float] = None
    r: Optional[float] = None
    alpha: Optional[str] = None
    grid: Tuple[Tuple[float, float], ...] = ()
    samples: int = 100000
    seed: int = 42
    workers: int = 1
    streams: int = 0
    rng: str = "PCG64"
    batch_elements: int = 1000000
    epsilon: Optional[float] = None
    precision: int = 30
    max_precision: int = DEFAULT_MAX_PRECISION
    quad_epsabs: float = 1e-12
    quad_epsrel: float = 1e-10
    quad_limit: int = 200
    oracle_cap: int = 9
    partition_cap: int = 60
    exact_max_n: int = 32
    q1: bool = False
    suite: str = "all"
    max_n: int = 8
    output_format: str = "json"
    output: Optional[str] = None

    @property
    def effective_streams(self) -> int:
        return self.streams or self.workers

    def resolved_epsilon(self) -> Optional[float]:
        if self.epsilon is not None:
            return self.epsilon
        if self.s is not None and self.r is not None:
            return self.r / (4 * math.e * (self.s + self.r))
        return None

    def echo(self) -> Dict[str, Any]:
        """ Settings relevant to the subcommand, as JSON-ready values """
        echo: Dict[str, Any] = {"subcommand": self.subcommand, "precision": self.precision,
                                "max_precision": self.max_precision}
        if self.lam is not None:
            echo["lambda"] = self.lam
        if self.family is not None:
            echo["family"] = self.family
        if self.s is not None:
            echo["s"] = self.s
        if self.r is not None:
            echo["r"] = self.r
        if self.alpha is not None:
            echo["alpha"] = self.alpha
        if self.subcommand in ("sample", "converge", "verify"):
            echo.update({"samples": self.samples, "seed": self.seed, "workers": self.workers,
                         "streams": self.effective_streams, "rng": self.rng,
                         "batch_elements": self.batch_elements})
        if self.subcommand == "sample":
            echo["grid"] = [list(point) for point in self.grid]
        if self.subcommand in ("converge", "verify"):
            echo.update({"exact_max_n": self.exact_max_n, "quad_epsabs": self.quad_epsabs,
                         "quad_epsrel": self.quad_epsrel, "quad_limit": self.quad_limit,
                         "partition_cap": self.partition_cap})
            echo["epsilon"] = self.resolved_epsilon() if self.subcommand == "converge" else self.epsilon
        if self.subcommand in ("oracle", "verify"):
            echo["oracle_cap"] = self.oracle_cap
        if self.subcommand == "exact":
            echo["q1"] = self.q1
        if self.subcommand == "verify":
            echo.update({"suite": self.suite, "max_n": self.max_n})
        return echo


def build_run_config(args: argparse.Namespace, config: configparser.ConfigParser) -> RunConfig:
    """
    Merge command line flags over config file values
    """
    section = config[SECTION]

    def pick(name: str, getter: str) -> Any:
        value = getattr(args, name, None)
        if value is not None:
            return value
        return getattr(section, getter)(name)

    precision = getattr(args, "precision", None)
    if precision is None:
        precision = section.getint("precision") if section.get("precision") else default_precision()
    epsilon = getattr(args, "epsilon", None)
    if epsilon is None and section.get("epsilon"):
        epsilon = section.getfloat("epsilon")
    grid_text = getattr(args, "grid", None)
    return RunConfig(
            subcommand=args.command,
            lam=getattr(args, "lam", None),
            family=getattr(args, "family", None),
            s=getattr(args, "s", None),
            r=getattr(args, "r", None),
            alpha=getattr(args, "alpha", None),
            grid=parse_grid(grid_text) if grid_text else (),
            samples=pick("samples", "getint"),
            seed=pick("seed", "getint"),
            workers=pick("workers", "getint"),
            streams=pick("streams", "getint"),
            rng=pick("rng", "get"),
            batch_elements=section.getint("batch_elements"),
            epsilon=epsilon,
            precision=precision,
            max_precision=section.getint("max_precision"),
            quad_epsabs=section.getfloat("quad_epsabs"),
            quad_epsrel=section.getfloat("quad_epsrel"),
            quad_limit=section.getint("quad_limit"),
            oracle_cap=pick("oracle_cap", "getint"),
            partition_cap=section.getint("partition_cap"),
            exact_max_n=pick("exact_max_n", "getint"),
            q1=bool(getattr(args, "q1", False)),
            suite=getattr(args, "suite", None) or "all",
            max_n=getattr(args, "max_n", None) or 8,
            output_format=getattr(args, "format", None) or "json",
            output=getattr(args, "output", None),
    )
