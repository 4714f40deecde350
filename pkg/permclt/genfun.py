"""
Joint generating function of (descent number, major index) over one
conjugacy class.

The class sum is recovered from the identity

    sum_{pi in C} t^d(pi) q^maj(pi) / prod_{j=0..n} (1 - t q^j)
        = sum_{a >= 1} t^a prod_i E[ prod_k f_{i,a}(q^k)^{m_k(sigma_i)} ]

where sigma_i is uniform in S_{lam[i]} and f_{i,a} counts primitive
necklaces of length i over a letters by weight. Multiplying through by the
finite product gives a numerator of t-degree at most n; the a-sum is cut at
n + 3 and the coefficients of t^(n+1..n+3) must vanish.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Any, Iterator, List, Mapping, Optional, Sequence, Tuple

import mpmath

from permclt.combinatorics import CycleType, centering, class_size, divisors, mobius, partitions_of
from permclt.errors import InternalInconsistency, MissingCycleVariable, ValidationError
from permclt.exactpoly import QPoly, TQPoly, mul, power, qbracket, scale, to_mpf
from permclt.utils import DEFAULT_MAX_PRECISION, resolve_precision, timed

# Extra terms of the a-sum whose t-coefficients must vanish
GUARD_TERMS = 3


@dataclass(frozen=True)
class MasterGFResult:
    lam: CycleType
    gf: TQPoly
    # prod_i E[...] for a = 1..n+3
    per_a: Tuple[QPoly, ...]


@dataclass(frozen=True)
class KBounds:
    lower: Fraction
    value: Fraction
    binomial_bound: Fraction
    upper: Any

    def holds(self) -> bool:
        if not self.lower <= self.value <= self.binomial_bound:
            return False
        if isinstance(self.upper, Fraction):
            return self.binomial_bound <= self.upper
        return bool(to_mpf(self.binomial_bound) <= self.upper)


@lru_cache(maxsize=None)
def f_iaq(i: int, a: int) -> QPoly:
    """
    f_{i,a}(q) = (1/i) sum_{d | i} mu(d) [a]_{q^d}^(i/d)

    :return: a polynomial with nonnegative integer coefficients
    """
    if i < 1 or a < 1:
        raise ValidationError(f"f_iaq needs i >= 1 and a >= 1, got i={i}, a={a}")
    total = QPoly()
    for d in divisors(i):
        mu = mobius(d)
        if mu:
            total = total + scale(power(qbracket(a, d), i // d), mu)
    result = scale(total, Fraction(1, i))
    if not result.is_integral or any(c < 0 for c in result.integer_coeffs()):
        raise InternalInconsistency(f"f_({i},{a}) is not a nonnegative integer polynomial: {result}")
    return result


def necklace_count(r: Sequence[int]) -> int:
    """
    Number of primitive circular words where letter k appears r[k] times
    """
    if not r or any(x < 0 for x in r) or sum(r) < 1:
        raise ValidationError(f"necklace_count needs nonnegative counts with a positive sum, got {list(r)}")
    n = sum(r)
    g = reduce(math.gcd, r)
    total = 0
    for d in divisors(g):
        mu = mobius(d)
        if not mu:
            continue
        term = math.factorial(n // d)
        for x in r:
            term //= math.factorial(x // d)
        total += mu * term
    if total % n:
        raise InternalInconsistency(f"Necklace count for {list(r)} is not an integer")
    return total // n


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """ Weak compositions of <total> into <parts> nonnegative parts """
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def j_series(i: int, a: int) -> QPoly:
    """
    sum_m J_{i,m,a} q^m in one sweep over the letter counts r with
    sum(r) = i, where each r contributes to m = sum_k (k - 1) r_k
    """
    if i < 1 or a < 1:
        raise ValidationError(f"j_series needs i >= 1 and a >= 1, got i={i}, a={a}")
    coeffs = [0] * (i * (a - 1) + 1)
    for r in _compositions(i, a):
        m = sum(k * rk for k, rk in enumerate(r))
        coeffs[m] += necklace_count(r)
    return QPoly(coeffs)


def j_ima(i: int, m: int, a: int) -> int:
    if m < 0:
        raise ValidationError(f"j_ima needs m >= 0, got {m}")
    coefficient = j_series(i, a)[m]
    return coefficient.numerator


def cycle_index_expectation(size: int, x: Mapping[int, QPoly],
                            cap: Optional[int] = None, truncate: bool = False) -> QPoly:
    """
    E[prod_k x[k]^m_k(sigma)] for sigma uniform in S_size.

    Uses Z_0 = 1, Z_m = (1/m) sum_{k=1..m} x[k] Z_{m-k}, which is the
    partition sum over cycle types of S_m grouped by the cycle holding m.
    """
    if size < 0:
        raise ValidationError(f"Negative symmetric group size {size}")
    for k in range(1, size + 1):
        if k not in x:
            raise MissingCycleVariable(k)
    z: List[QPoly] = [QPoly([1])]
    for m in range(1, size + 1):
        acc = QPoly()
        for k in range(1, m + 1):
            acc = acc + mul(x[k], z[m - k], cap, truncate)
        z.append(scale(acc, Fraction(1, m)))
    return z[size]


def cycle_count_expectation(size: int, x: int) -> int:
    """
    E[x^(number of cycles)] over S_size, i.e. C(size + x - 1, size)
    """
    if size < 0 or x < 0:
        raise ValidationError(f"cycle_count_expectation needs size, x >= 0, got {size}, {x}")
    if size == 0:
        return 1
    return math.comb(size + x - 1, size)


def _t_product_coefficients(n: int, cap: int) -> List[QPoly]:
    """ t-coefficients of prod_{j=0..n} (1 - t q^j), truncated at q^cap """
    prod: List[QPoly] = [QPoly([1])]
    for j in range(n + 1):
        shift = QPoly.monomial(j)
        new = prod + [QPoly()]
        for k in range(1, len(new)):
            new[k] = new[k] - mul(shift, prod[k - 1], cap, truncate=True)
        prod = new
    return prod


def _class_factor(lam: CycleType, a: int, cap: int) -> QPoly:
    result = QPoly([1])
    for i, m in lam.items():
        f = f_iaq(i, a)
        x = {k: f.substitute_power(k, cap, truncate=True) for k in range(1, m + 1)}
        result = mul(result, cycle_index_expectation(m, x, cap, truncate=True), cap, truncate=True)
    return result


@lru_cache(maxsize=64)
def joint_gf(lam: CycleType) -> MasterGFResult:
    """
    sum_{pi in C_lam} t^d(pi) q^maj(pi), exactly.

    :raise InternalInconsistency: when a guard coefficient survives or a
        coefficient is not a nonnegative integer
    """
    n = lam.n
    if n < 1:
        raise ValidationError("joint_gf needs a cycle type of a permutation of n >= 1 points")
    maj_max = n * (n - 1) // 2
    cap = maj_max + n
    top = n + GUARD_TERMS
    with timed("joint_gf(%s), n=%d", lam, n):
        per_a = [_class_factor(lam, a, cap) for a in range(1, top + 1)]
        logging.debug("joint_gf(%s): per-a products up to a=%d, truncated at q^%d", lam, top, cap)
        c = _t_product_coefficients(n, cap)
        numerator: List[QPoly] = []
        for k in range(1, top + 1):
            acc = QPoly()
            for a in range(max(1, k - (n + 1)), k + 1):
                acc = acc + mul(c[k - a], per_a[a - 1], cap, truncate=True)
            numerator.append(acc)

    for k in range(n + 1, top + 1):
        if not numerator[k - 1].is_zero():
            raise InternalInconsistency(
                    f"Guard coefficient of t^{k} does not vanish for class {lam}")
    coefficients = numerator[:n]
    for k, poly in enumerate(coefficients, start=1):
        if poly.degree > maj_max:
            raise InternalInconsistency(
                    f"Coefficient of t^{k} for class {lam} reaches q^{poly.degree} > q^{maj_max}")
        if not poly.is_integral or any(x < 0 for x in poly.integer_coeffs()):
            raise InternalInconsistency(
                    f"Coefficient of t^{k} for class {lam} is not a nonnegative integer polynomial")
    gf = TQPoly.from_t_coefficients(coefficients, start=1)
    if gf.total() != class_size(lam):
        raise InternalInconsistency(
                f"Generating function of {lam} sums to {gf.total()}, expected {class_size(lam)}")
    return MasterGFResult(lam=lam, gf=gf, per_a=tuple(per_a))


def _f_at_one(i: int, a: int) -> int:
    """ f_{i,a}(1): number of primitive necklaces of length i over a letters """
    return sum(mobius(d) * a ** (i // d) for d in divisors(i)) // i


def eulerian_specialization(lam: CycleType) -> QPoly:
    """
    q = 1 specialization of joint_gf, as a polynomial in t, computed from

        sum t^d / (1-t)^(n+1) = sum_a t^a prod_i C(lam[i] + f_{i,a}(1) - 1, lam[i])
    """
    n = lam.n
    if n < 1:
        raise ValidationError("eulerian_specialization needs n >= 1")
    top = n + GUARD_TERMS
    series = [Fraction(0)] * (top + 1)
    for a in range(1, top + 1):
        term = 1
        for i, m in lam.items():
            term *= math.comb(m + _f_at_one(i, a) - 1, m)
        series[a] = Fraction(term)
    factor = [(-1) ** j * math.comb(n + 1, j) for j in range(n + 2)]
    numerator = [sum((factor[k - a] * series[a] for a in range(max(0, k - n - 1), k + 1)), Fraction(0))
                 for k in range(top + 1)]
    if any(numerator[n + 1:]):
        raise InternalInconsistency(f"Guard coefficients of the q=1 series do not vanish for class {lam}")
    return QPoly(numerator[:n + 1])


def k_factor(lam: CycleType, i: int, a: int, q: Fraction) -> Fraction:
    """
    K = lam[i]! i^lam[i] E[prod_k f_{i,a}(q^k)^m_k(sigma)] at a rational q
    """
    if not 0 <= q <= 1:
        raise ValidationError(f"k_factor needs q in [0, 1], got {q}")
    m = lam[i]
    f = f_iaq(i, a)
    x = {k: QPoly([f.evaluate(q ** k)]) for k in range(1, m + 1)}
    expectation = cycle_index_expectation(m, x)[0]
    return math.factorial(m) * i ** m * expectation


def k_bounds(lam: CycleType, i: int, a: int, q: Fraction) -> KBounds:
    """
    (i f)^m <= K <= i^m f (f+1) ... (f+m-1) <= (i f)^m e^(m^2/f)
    with f = f_{i,a}(q) and m = lam[i]
    """
    m = lam[i]
    f = f_iaq(i, a).evaluate(q)
    rising = Fraction(1)
    for j in range(m):
        rising *= f + j
    binomial_bound = i ** m * rising
    if f == 0:
        upper: Any = Fraction(0) if m else Fraction(1)
    else:
        upper = to_mpf((i * f) ** m) * mpmath.exp(to_mpf(Fraction(m * m) / f))
    return KBounds(lower=(i * f) ** m, value=k_factor(lam, i, a, q),
                   binomial_bound=binomial_bound, upper=upper)


def mgf_of_gf(gf: TQPoly, n: int, alpha1: Fraction, total: int, s: float, r: float,
              precision: Optional[int] = None) -> Any:
    """
    M_W(-s, -r) of a conjugation-invariant set with generating function
    <gf> and <total> members, fixed-point density <alpha1>.
    """
    if s <= 0 or r <= 0:
        raise ValidationError(f"m.g.f. is evaluated at (-s, -r) with s, r > 0, got s={s}, r={r}")
    digits = resolve_precision(precision)
    center_d, center_maj = centering(n, alpha1)
    with mpmath.workdps(digits):
        root = mpmath.sqrt(n)
        s_ = to_mpf(s)
        r_ = to_mpf(r)
        t = mpmath.exp(-s_ / root)
        q = mpmath.exp(-r_ / (n * root))
        expectation = gf.evaluate(t, q) / total
        shift = mpmath.exp(s_ * to_mpf(center_d) / root + r_ * to_mpf(center_maj) / (n * root))
        return +(expectation * shift)


def mgf_exact(lam: CycleType, s: float, r: float, precision: Optional[int] = None,
              max_precision: int = DEFAULT_MAX_PRECISION) -> Any:
    """
    Exact M_{W_lam}(-s, -r), evaluated at <precision> decimal digits
    """
    digits = resolve_precision(precision, max_precision)
    result = joint_gf(lam)
    return mgf_of_gf(result.gf, lam.n, lam.alpha1, class_size(lam), s, r, digits)


def _check_union(classes: Sequence[CycleType]) -> Tuple[int, Fraction]:
    if not classes:
        raise ValidationError("A union of conjugacy classes needs at least one class")
    if len(set(classes)) != len(classes):
        raise ValidationError("A union of conjugacy classes cannot repeat a class")
    n = classes[0].n
    fixed = classes[0].fixed_points
    for lam in classes:
        if lam.n != n or lam.fixed_points != fixed:
            raise ValidationError(
                    f"Classes of a union must share n and the number of fixed points: {lam} vs {classes[0]}")
    return n, classes[0].alpha1


def union_gf(classes: Sequence[CycleType]) -> TQPoly:
    """ Generating function of the union of <classes> """
    _check_union(classes)
    return reduce(lambda acc, lam: acc + joint_gf(lam).gf, classes, TQPoly())


def mixture_mgf(classes: Sequence[CycleType], s: float, r: float,
                precision: Optional[int] = None) -> Any:
    """ Class-size weighted mixture of the per-class m.g.f. values """
    _check_union(classes)
    digits = resolve_precision(precision)
    sizes = [class_size(lam) for lam in classes]
    with mpmath.workdps(digits):
        weighted = mpmath.fsum(size * mgf_exact(lam, s, r, digits) for lam, size in zip(classes, sizes))
        return +(weighted / sum(sizes))


def union_mgf(classes: Sequence[CycleType], s: float, r: float,
              precision: Optional[int] = None) -> Any:
    """ m.g.f. of the pooled distribution of a union of classes """
    n, alpha1 = _check_union(classes)
    total = sum(class_size(lam) for lam in classes)
    return mgf_of_gf(union_gf(classes), n, alpha1, total, s, r, precision)


def classes_with_fixed_points(n: int, fixed: int) -> List[CycleType]:
    """ Every cycle type of S_n with exactly <fixed> fixed points """
    return [lam for lam in partitions_of(n) if lam.fixed_points == fixed]
