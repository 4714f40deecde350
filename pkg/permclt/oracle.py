"""
Brute-force ground truth for the generating function: permutations are
enumerated and their statistics computed straight from one-line notation.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Tuple

from permclt.combinatorics import CycleType, class_size
from permclt.errors import CapExceeded, InternalInconsistency, ValidationError
from permclt.exactpoly import TQPoly
from permclt.utils import timed

DEFAULT_ORACLE_CAP = 9
HARD_ORACLE_CAP = 11
# Up to this n every class is tallied by one sweep over S_n
FULL_SWEEP_MAX_N = 9


@dataclass(frozen=True)
class Permutation:
    one_line: Tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.one_line) != list(range(1, len(self.one_line) + 1)):
            raise ValidationError(f"{list(self.one_line)} is not a permutation of 1..{len(self.one_line)}")

    @property
    def n(self) -> int:
        return len(self.one_line)

    @staticmethod
    def identity(n: int) -> 'Permutation':
        return Permutation(tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.one_line[i - 1]

    def cycles(self) -> List[Tuple[int, ...]]:
        """ Cycle decomposition, each cycle led by its least element """
        seen = [False] * (self.n + 1)
        result = []
        for start in range(1, self.n + 1):
            if seen[start]:
                continue
            cycle = []
            i = start
            while not seen[i]:
                seen[i] = True
                cycle.append(i)
                i = self(i)
            result.append(tuple(cycle))
        return result

    def __str__(self) -> str:
        return ' '.join(str(v) for v in self.one_line)


def _descent_positions(one_line: Tuple[int, ...]) -> List[int]:
    return [i for i in range(1, len(one_line)) if one_line[i - 1] > one_line[i]]


def descent_number(p: Permutation) -> int:
    """ Number of descents plus one """
    if p.n < 1:
        raise ValidationError("The descent number is defined for n >= 1")
    return 1 + len(_descent_positions(p.one_line))


def major_index(p: Permutation) -> int:
    """ Sum of the descent positions """
    if p.n < 1:
        raise ValidationError("The major index is defined for n >= 1")
    return sum(_descent_positions(p.one_line))


def _cycle_mult(one_line: Tuple[int, ...]) -> Tuple[int, ...]:
    n = len(one_line)
    mult = [0] * n
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            length += 1
            i = one_line[i] - 1
        mult[length - 1] += 1
    return tuple(mult)


def cycle_type_of(p: Permutation) -> CycleType:
    return CycleType(_cycle_mult(p.one_line))


@dataclass(frozen=True)
class JointDistribution:
    lam: CycleType
    counts: Mapping[Tuple[int, int], int] = field(hash=False)

    def total(self) -> int:
        return sum(self.counts.values())

    def rows(self) -> Iterator[Tuple[int, int, int]]:
        """ Yield (d, maj, count) sorted by d then maj """
        for d, maj in sorted(self.counts):
            yield d, maj, self.counts[(d, maj)]

    def d_marginal(self) -> Dict[int, int]:
        marginal: Dict[int, int] = {}
        for (d, _), c in self.counts.items():
            marginal[d] = marginal.get(d, 0) + c
        return marginal

    def maj_marginal(self) -> Dict[int, int]:
        marginal: Dict[int, int] = {}
        for (_, maj), c in self.counts.items():
            marginal[maj] = marginal.get(maj, 0) + c
        return marginal

    def to_tqpoly(self) -> TQPoly:
        return TQPoly(self.counts)

    @staticmethod
    def from_tqpoly(lam: CycleType, gf: TQPoly) -> 'JointDistribution':
        counts = {}
        for d, maj, c in gf.items():
            if c.denominator != 1:
                raise ValidationError(f"Coefficient {c} of t^{d} q^{maj} is not a count")
            counts[(d, maj)] = c.numerator
        return JointDistribution(lam, counts)


def _check_cap(n: int, cap: int) -> None:
    if cap > HARD_ORACLE_CAP:
        raise CapExceeded("The brute-force oracle cap", HARD_ORACLE_CAP, cap)
    if n > cap:
        raise CapExceeded("Brute-force enumeration", cap, n)


@lru_cache(maxsize=4)
def symmetric_group_tables(n: int) -> Dict[CycleType, JointDistribution]:
    """
    Tally (d, maj) for every class of S_n in a single sweep over n! permutations
    """
    if n < 1:
        raise ValidationError("symmetric_group_tables needs n >= 1")
    _check_cap(n, FULL_SWEEP_MAX_N)
    tallies: Dict[Tuple[int, ...], Dict[Tuple[int, int], int]] = {}
    with timed("Sweep over S_%d", n):
        for one_line in itertools.permutations(range(1, n + 1)):
            positions = _descent_positions(one_line)
            key = (1 + len(positions), sum(positions))
            table = tallies.setdefault(_cycle_mult(one_line), {})
            table[key] = table.get(key, 0) + 1
    return {CycleType(mult): JointDistribution(CycleType(mult), counts)
            for mult, counts in tallies.items()}


def class_members(lam: CycleType) -> Iterator[Permutation]:
    """
    Every permutation of cycle type <lam>, each exactly once.

    The cycle through the least unused point is chosen first: its length
    among the remaining ones, then the ordered list of its other points.
    """
    n = lam.n
    image = [0] * (n + 1)
    remaining = {k: m for k, m in lam.items()}

    def fill(unused: List[int]) -> Iterator[Permutation]:
        if not unused:
            yield Permutation(tuple(image[1:]))
            return
        lead, rest = unused[0], unused[1:]
        for k in sorted(remaining):
            if not remaining[k]:
                continue
            remaining[k] -= 1
            for others in itertools.permutations(rest, k - 1):
                cycle = (lead,) + others
                for j, point in enumerate(cycle):
                    image[point] = cycle[(j + 1) % k]
                taken = set(others)
                yield from fill([x for x in rest if x not in taken])
            remaining[k] += 1

    yield from fill(list(range(1, n + 1)))


def joint_distribution_bruteforce(lam: CycleType, cap: int = DEFAULT_ORACLE_CAP) -> JointDistribution:
    """
    :raise CapExceeded: when n is above <cap>, or <cap> above the hard cap
    """
    n = lam.n
    if n < 1:
        raise ValidationError("The brute-force oracle needs n >= 1")
    _check_cap(n, cap)
    if n <= FULL_SWEEP_MAX_N:
        result = symmetric_group_tables(n)[lam]
    else:
        counts: Dict[Tuple[int, int], int] = {}
        with timed("Direct enumeration of class %s", lam):
            for p in class_members(lam):
                positions = _descent_positions(p.one_line)
                key = (1 + len(positions), sum(positions))
                counts[key] = counts.get(key, 0) + 1
        result = JointDistribution(lam, counts)
    if result.total() != class_size(lam):
        raise InternalInconsistency(
                f"Enumerated {result.total()} members of class {lam}, expected {class_size(lam)}")
    logging.debug("Oracle table of %s has %d nonzero entries", lam, len(result.counts))
    return result
