import logging
import os
import time
from contextlib import contextmanager
from typing import Iterator, Optional

from permclt.errors import PrecisionBudgetExceeded, ValidationError

PRECISION_ENV = "PERMCLT_PRECISION"
DEFAULT_PRECISION = 30
DEFAULT_MAX_PRECISION = 2000
# Digits shown for real numbers in every output artifact
REPORTED_DIGITS = 17


def configure_logging(loglevel_str: str) -> None:
    """
    Configure logging utility
    """
    loglevel = getattr(logging, loglevel_str, None)
    if not isinstance(loglevel, int):
        raise ValueError(f"Invalid log level: {loglevel_str}")
    logging.basicConfig(level=loglevel, force=True)
    logging.info("Log level is set to %s", loglevel_str)


def default_precision() -> int:
    """
    Working precision in decimal digits: $PERMCLT_PRECISION if set, else 30
    """
    value = os.environ.get(PRECISION_ENV)
    if value is None or value == "":
        return DEFAULT_PRECISION
    try:
        digits = int(value)
    except ValueError:
        raise ValidationError(f"{PRECISION_ENV} must be an integer number of digits, got {value!r}")
    if digits < 1:
        raise ValidationError(f"{PRECISION_ENV} must be positive, got {digits}")
    return digits


def resolve_precision(requested: Optional[int] = None,
                      budget: int = DEFAULT_MAX_PRECISION) -> int:
    """
    Return the working precision to use, checked against <budget>
    """
    digits = default_precision() if requested is None else requested
    if digits < 1:
        raise ValidationError(f"Precision must be positive, got {digits}")
    if digits > budget:
        raise PrecisionBudgetExceeded(digits, budget)
    return digits


@contextmanager
def timed(what: str, *args: object) -> Iterator[None]:
    """
    Log at INFO how long the enclosed block took
    """
    start = time.perf_counter()
    yield
    logging.info(what + " took %.3fs", *args, time.perf_counter() - start)
