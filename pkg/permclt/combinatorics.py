"""
Cycle types of the symmetric group and the small amount of elementary number
theory the generating function needs.

A cycle type is stored as a dense multiplicity vector: entry k (1-based) is
the number of k-cycles. This is NOT the list of parts: ``lam[1]`` is the
number of fixed points, not the largest part.
"""
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

from permclt.errors import ValidationError


@dataclass(frozen=True)
class CycleType:
    mult: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(m < 0 for m in self.mult):
            raise ValidationError(f"Negative cycle multiplicity in {self.mult}")
        size = sum(k * m for k, m in enumerate(self.mult, start=1))
        if size != len(self.mult):
            raise ValidationError(
                    f"Multiplicity vector of length {len(self.mult)} describes "
                    f"a permutation of {size} points")

    def __getitem__(self, k: int) -> int:
        """ Number of k-cycles (0 for k > n) """
        if k < 1:
            raise IndexError(f"Cycle lengths start at 1, got {k}")
        return self.mult[k - 1] if k <= len(self.mult) else 0

    @property
    def n(self) -> int:
        return len(self.mult)

    @property
    def fixed_points(self) -> int:
        return self[1]

    @property
    def alpha1(self) -> Fraction:
        """ Density of fixed points; 0 for the empty class """
        if self.n == 0:
            return Fraction(0)
        return Fraction(self.fixed_points, self.n)

    @property
    def is_identity(self) -> bool:
        return self.fixed_points == self.n

    def items(self) -> Iterator[Tuple[int, int]]:
        """ Yield (k, mult[k]) for every cycle length actually present """
        for k, m in enumerate(self.mult, start=1):
            if m:
                yield k, m

    def cycle_lengths(self) -> List[int]:
        """ Cycle lengths sorted in descending order, with repetition """
        lengths: List[int] = []
        for k, m in sorted(self.items(), reverse=True):
            lengths.extend([k] * m)
        return lengths

    @staticmethod
    def from_counts(counts: Mapping[int, int]) -> 'CycleType':
        """
        Build a cycle type from a mapping k -> number of k-cycles
        """
        for k, m in counts.items():
            if k < 1:
                raise ValidationError(f"Invalid cycle length {k}")
            if m < 0:
                raise ValidationError(f"Invalid multiplicity {m} for cycle length {k}")
        n = sum(k * m for k, m in counts.items())
        mult = [0] * n
        for k, m in counts.items():
            if m:
                mult[k - 1] += m
        return CycleType(tuple(mult))

    @staticmethod
    def from_lengths(lengths: Iterable[int]) -> 'CycleType':
        counts: Dict[int, int] = {}
        for k in lengths:
            counts[k] = counts.get(k, 0) + 1
        return CycleType.from_counts(counts)

    @staticmethod
    def parse(text: str) -> 'CycleType':
        """
        Parse either the ``k^m`` factor format (``"1^2 3^1"``) or a JSON
        array of [k, m] pairs (``"[[1, 2], [3, 1]]"``).
        A bare ``k`` is read as ``k^1``.
        """
        text = text.strip()
        if text.startswith('['):
            return CycleType._parse_json(text)
        counts: Dict[int, int] = {}
        for factor in text.split():
            base, _, exponent = factor.partition('^')
            try:
                k = int(base)
                m = int(exponent) if exponent else 1
            except ValueError:
                raise ValidationError(
                        f"Malformed cycle type factor {factor!r}, expected k^m as in \"1^2 3^1\"")
            if k in counts:
                raise ValidationError(f"Cycle length {k} appears twice in {text!r}")
            counts[k] = m
        return CycleType.from_counts(counts)

    @staticmethod
    def _parse_json(text: str) -> 'CycleType':
        try:
            pairs = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"Malformed cycle type JSON {text!r}: {e}")
        counts: Dict[int, int] = {}
        if not isinstance(pairs, list):
            raise ValidationError(f"Cycle type JSON must be an array of [k, m] pairs: {text!r}")
        for pair in pairs:
            if (not isinstance(pair, list) or len(pair) != 2
                    or not all(isinstance(v, int) for v in pair)):
                raise ValidationError(f"Invalid [k, m] pair {pair!r} in {text!r}")
            k, m = pair
            if k in counts:
                raise ValidationError(f"Cycle length {k} appears twice in {text!r}")
            counts[k] = m
        return CycleType.from_counts(counts)

    def to_text(self) -> str:
        return ' '.join(f"{k}^{m}" for k, m in self.items())

    def to_json(self) -> str:
        return json.dumps([[k, m] for k, m in self.items()])

    def __str__(self) -> str:
        return self.to_text() or "(empty)"


def class_size(lam: CycleType) -> int:
    """
    Number of permutations with cycle type <lam>:
    n! / prod_k (mult[k]! * k^mult[k])
    """
    denominator = 1
    for k, m in lam.items():
        denominator *= math.factorial(m) * k ** m
    return math.factorial(lam.n) // denominator


def iter_multiplicities(n: int) -> Iterator[Tuple[int, ...]]:
    """
    Lazily enumerate the partitions of <n> as multiplicity vectors of
    length <n>, largest parts first. Each partition is produced once.
    """
    if n < 0:
        raise ValidationError(f"Cannot partition a negative integer ({n})")
    mult = [0] * n

    def fill(remaining: int, max_part: int) -> Iterator[Tuple[int, ...]]:
        if remaining == 0:
            yield tuple(mult)
            return
        for k in range(min(remaining, max_part), 0, -1):
            for m in range(remaining // k, 0, -1):
                mult[k - 1] = m
                yield from fill(remaining - k * m, k - 1)
            mult[k - 1] = 0

    yield from fill(n, n)


def partitions_of(n: int) -> List[CycleType]:
    return [CycleType(mult) for mult in iter_multiplicities(n)]


@lru_cache(maxsize=None)
def divisors(i: int) -> Tuple[int, ...]:
    if i < 1:
        raise ValidationError(f"divisors() needs a positive integer, got {i}")
    small = []
    large = []
    d = 1
    while d * d <= i:
        if i % d == 0:
            small.append(d)
            if d * d != i:
                large.append(i // d)
        d += 1
    return tuple(small + large[::-1])


@lru_cache(maxsize=None)
def mobius(d: int) -> int:
    if d < 1:
        raise ValidationError(f"mobius() needs a positive integer, got {d}")
    result = 1
    p = 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            result = -result
        p += 1
    if d > 1:
        result = -result
    return result


def centering(n: int, alpha1: Fraction) -> Tuple[Fraction, Fraction]:
    """
    Centering of (d, maj) in the normalized pair W:
    ((1 - alpha1^2) n / 2, (1 - alpha1^2) n^2 / 4)
    """
    c = 1 - alpha1 * alpha1
    return c * n / 2, c * n * n / 4
