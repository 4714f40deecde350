"""
Exact polynomial arithmetic over the rationals.

QPoly is a dense univariate polynomial (in q, or in t when used for a
q = 1 specialization). Coefficients are kept as a tuple of integer numerators
over one common positive denominator, which keeps multiplication in pure
integer arithmetic. Large products go through Kronecker substitution: both
operands are packed into one big integer, multiplied once by CPython's
Karatsuba, and unpacked.

TQPoly is a sparse bivariate polynomial in (t, q): t-degrees stay below n
while q-degrees reach n(n-1)/2.

Every operation accepts an optional degree cap. With ``truncate=False`` a
result above the cap raises DegreeCapExceeded; with ``truncate=True`` it is
reduced modulo q^(cap+1), which is a ring homomorphism and so keeps all
coefficients of degree <= cap exact.
"""
import math
from fractions import Fraction
from functools import reduce
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath

from permclt.errors import DegreeCapExceeded, ValidationError

Rational = Union[int, Fraction]

# Below this many coefficient products, schoolbook multiplication beats packing
SCHOOLBOOK_LIMIT = 4096


def _split_signs(values: Sequence[int]) -> Tuple[List[int], List[int]]:
    positive = [v if v > 0 else 0 for v in values]
    negative = [-v if v < 0 else 0 for v in values]
    return positive, negative


def _kronecker(a: Sequence[int], b: Sequence[int]) -> List[int]:
    """
    Product of two polynomials with nonnegative integer coefficients,
    evaluated at a power of two large enough that no coefficient overlaps.
    """
    out_len = len(a) + len(b) - 1
    bound = max(a) * max(b) * min(len(a), len(b))
    if bound == 0:
        return [0] * out_len
    width = (bound.bit_length() + 8) // 8
    packed_a = int.from_bytes(b''.join(x.to_bytes(width, 'little') for x in a), 'little')
    packed_b = int.from_bytes(b''.join(x.to_bytes(width, 'little') for x in b), 'little')
    raw = (packed_a * packed_b).to_bytes(out_len * width, 'little')
    return [int.from_bytes(raw[i * width:(i + 1) * width], 'little') for i in range(out_len)]


def _convolve(a: Sequence[int], b: Sequence[int]) -> List[int]:
    if not a or not b:
        return []
    if len(a) * len(b) <= SCHOOLBOOK_LIMIT:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    a_pos, a_neg = _split_signs(a)
    b_pos, b_neg = _split_signs(b)
    out = _kronecker(a_pos, b_pos)
    a_has_neg = any(a_neg)
    b_has_neg = any(b_neg)
    if a_has_neg and b_has_neg:
        out = [x + y for x, y in zip(out, _kronecker(a_neg, b_neg))]
    if b_has_neg:
        out = [x - y for x, y in zip(out, _kronecker(a_pos, b_neg))]
    if a_has_neg:
        out = [x - y for x, y in zip(out, _kronecker(a_neg, b_pos))]
    return out


class QPoly:
    """
    Dense polynomial with exact rational coefficients; index = power.
    Instances are immutable and normalized (no trailing zero coefficient).
    """
    __slots__ = ('_num', '_den')
    _num: Tuple[int, ...]
    _den: int

    def __init__(self, coeffs: Iterable[Rational] = ()) -> None:
        fractions = [Fraction(c) for c in coeffs]
        den = reduce(lambda x, y: x * y // math.gcd(x, y),
                     (c.denominator for c in fractions), 1)
        num = [c.numerator * (den // c.denominator) for c in fractions]
        self._set(num, den)

    def _set(self, num: List[int], den: int) -> None:
        while num and num[-1] == 0:
            num.pop()
        if not num:
            den = 1
        g = reduce(math.gcd, num, den)
        if g > 1:
            num = [c // g for c in num]
            den //= g
        self._num = tuple(num)
        self._den = den

    @classmethod
    def _raw(cls, num: List[int], den: int = 1) -> 'QPoly':
        poly = cls.__new__(cls)
        poly._set(num, den)
        return poly

    @classmethod
    def monomial(cls, degree: int, coeff: Rational = 1) -> 'QPoly':
        return cls([0] * degree + [coeff])

    @property
    def coeffs(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(c, self._den) for c in self._num)

    @property
    def degree(self) -> int:
        """ Degree, -1 for the zero polynomial """
        return len(self._num) - 1

    @property
    def is_integral(self) -> bool:
        return self._den == 1

    def integer_coeffs(self) -> Tuple[int, ...]:
        if self._den != 1:
            raise ValueError(f"Polynomial {self} has non-integer coefficients")
        return self._num

    def is_zero(self) -> bool:
        return not self._num

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self._num):
            return Fraction(self._num[i], self._den)
        return Fraction(0)

    def __len__(self) -> int:
        return len(self._num)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = QPoly([other])
        if not isinstance(other, QPoly):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self) -> int:
        return hash((self._num, self._den))

    def __neg__(self) -> 'QPoly':
        return QPoly._raw([-c for c in self._num], self._den)

    def __add__(self, other: Any) -> 'QPoly':
        if isinstance(other, (int, Fraction)):
            other = QPoly([other])
        if not isinstance(other, QPoly):
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other: Any) -> 'QPoly':
        if isinstance(other, (int, Fraction)):
            other = QPoly([other])
        if not isinstance(other, QPoly):
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other: Any) -> 'QPoly':
        return (-self).__add__(other)

    def __mul__(self, other: Any) -> 'QPoly':
        if isinstance(other, (int, Fraction)):
            return scale(self, other)
        if not isinstance(other, QPoly):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'QPoly':
        return power(self, exponent)

    def truncate(self, cap: int) -> 'QPoly':
        """ Reduce modulo q^(cap+1) """
        if len(self._num) <= cap + 1:
            return self
        return QPoly._raw(list(self._num[:cap + 1]), self._den)

    def substitute_power(self, k: int, cap: Optional[int] = None,
                         truncate: bool = False) -> 'QPoly':
        """
        Return the polynomial in q^k, i.e. p(q) -> p(q^k)
        """
        if k < 1:
            raise ValidationError(f"Substitution power must be positive, got {k}")
        if k == 1 or self.degree <= 0:
            return _check_cap(self, cap, truncate)
        num = self._num
        if cap is not None and truncate:
            num = num[:cap // k + 1]
        out = [0] * ((len(num) - 1) * k + 1)
        for i, c in enumerate(num):
            out[i * k] = c
        return _check_cap(QPoly._raw(out, self._den), cap, truncate)

    def evaluate(self, point: Any) -> Any:
        return evaluate(self, point)

    def format(self, var: str = 'q') -> str:
        if not self._num:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
                continue
            monomial = var if i == 1 else f"{var}^{i}"
            if c == 1:
                terms.append(monomial)
            elif c == -1:
                terms.append(f"-{monomial}")
            else:
                terms.append(f"{c}*{monomial}")
        return " + ".join(terms).replace("+ -", "- ")

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"QPoly({self.format()})"


def _check_cap(poly: QPoly, cap: Optional[int], truncate: bool) -> QPoly:
    if cap is None or poly.degree <= cap:
        return poly
    if truncate:
        return poly.truncate(cap)
    raise DegreeCapExceeded(poly.degree, cap)


def qbracket(a: int, power: int = 1) -> QPoly:
    """
    [a]_{q^power} = 1 + q^power + ... + q^(power*(a-1))
    """
    if a < 0 or power < 1:
        raise ValidationError(f"qbracket needs a >= 0 and power >= 1, got a={a}, power={power}")
    if a == 0:
        return QPoly()
    num = [0] * (power * (a - 1) + 1)
    for x in range(a):
        num[power * x] = 1
    return QPoly._raw(num)


def add(f: QPoly, g: QPoly, cap: Optional[int] = None, truncate: bool = False) -> QPoly:
    den = f._den * g._den // math.gcd(f._den, g._den)
    sf = den // f._den
    sg = den // g._den
    size = max(len(f._num), len(g._num))
    num = [0] * size
    for i, c in enumerate(f._num):
        num[i] = c * sf
    for i, c in enumerate(g._num):
        num[i] += c * sg
    return _check_cap(QPoly._raw(num, den), cap, truncate)


def scale(f: QPoly, c: Rational) -> QPoly:
    c = Fraction(c)
    return QPoly._raw([x * c.numerator for x in f._num], f._den * c.denominator)


def mul(f: QPoly, g: QPoly, cap: Optional[int] = None, truncate: bool = False) -> QPoly:
    a = f._num
    b = g._num
    if cap is not None and truncate:
        a = a[:cap + 1]
        b = b[:cap + 1]
    product = QPoly._raw(_convolve(a, b), f._den * g._den)
    return _check_cap(product, cap, truncate)


def power(f: QPoly, exponent: int, cap: Optional[int] = None, truncate: bool = False) -> QPoly:
    """ f ** exponent by repeated squaring """
    if exponent < 0:
        raise ValidationError(f"Negative exponent {exponent}")
    result = QPoly([1])
    base = f
    while exponent:
        if exponent & 1:
            result = mul(result, base, cap, truncate)
        exponent >>= 1
        if exponent:
            base = mul(base, base, cap, truncate)
    return result


def evaluate(f: QPoly, point: Any, precision: Optional[int] = None) -> Any:
    """
    Evaluate by Horner's rule. Exact for int/Fraction points; for a real
    point the caller states the working precision in decimal digits and the
    point is converted to an mpmath number at that precision.
    """
    if precision is not None:
        with mpmath.workdps(precision):
            x = mpmath.mpf(point.numerator) / point.denominator \
                    if isinstance(point, Fraction) else mpmath.mpf(point)
            return _horner(f, x)
    return _horner(f, point)


def _horner(f: QPoly, x: Any) -> Any:
    acc = 0 * x
    for c in reversed(f._num):
        acc = acc * x + c
    if isinstance(acc, int):
        return Fraction(acc, f._den)
    return acc / f._den


class TQPoly:
    """
    Sparse polynomial in (t, q): mapping (t-power, q-power) -> Fraction,
    with no stored zero coefficient.
    """
    __slots__ = ('terms',)
    terms: Dict[Tuple[int, int], Fraction]

    def __init__(self, terms: Optional[Mapping[Tuple[int, int], Rational]] = None) -> None:
        self.terms = {}
        for key, c in (terms or {}).items():
            if c:
                self.terms[key] = Fraction(c)

    @staticmethod
    def from_t_coefficients(coefficients: Sequence[QPoly], start: int = 0) -> 'TQPoly':
        """
        Assemble sum_k t^(start+k) * coefficients[k](q)
        """
        terms: Dict[Tuple[int, int], Fraction] = {}
        for k, poly in enumerate(coefficients):
            for j, c in enumerate(poly.coeffs):
                if c:
                    terms[(start + k, j)] = c
        return TQPoly(terms)

    @property
    def t_degree(self) -> int:
        return max((dt for dt, _ in self.terms), default=-1)

    @property
    def q_degree(self) -> int:
        return max((dq for _, dq in self.terms), default=-1)

    def min_t_degree(self) -> int:
        return min((dt for dt, _ in self.terms), default=-1)

    def coefficient(self, dt: int, dq: int) -> Fraction:
        return self.terms.get((dt, dq), Fraction(0))

    def items(self) -> Iterator[Tuple[int, int, Fraction]]:
        """ Yield (t-power, q-power, coefficient), sorted by powers """
        for (dt, dq) in sorted(self.terms):
            yield dt, dq, self.terms[(dt, dq)]

    def t_coefficient(self, k: int) -> QPoly:
        """ Coefficient of t^k, as a polynomial in q """
        degree = max((dq for dt, dq in self.terms if dt == k), default=-1)
        coeffs = [Fraction(0)] * (degree + 1)
        for (dt, dq), c in self.terms.items():
            if dt == k:
                coeffs[dq] = c
        return QPoly(coeffs)

    def total(self) -> Fraction:
        return sum(self.terms.values(), Fraction(0))

    def is_nonnegative_integral(self) -> bool:
        return all(c.denominator == 1 and c >= 0 for c in self.terms.values())

    def specialize_q1(self) -> QPoly:
        """ Set q = 1; the result is a polynomial in t """
        coeffs = [Fraction(0)] * (self.t_degree + 1)
        for (dt, _), c in self.terms.items():
            coeffs[dt] += c
        return QPoly(coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TQPoly):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other: 'TQPoly') -> 'TQPoly':
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, Fraction(0)) + c
        return TQPoly(terms)

    def __sub__(self, other: 'TQPoly') -> 'TQPoly':
        return self + other.scale(-1)

    def __mul__(self, other: 'TQPoly') -> 'TQPoly':
        return self.mul(other)

    def mul(self, other: 'TQPoly', t_cap: Optional[int] = None,
            q_cap: Optional[int] = None) -> 'TQPoly':
        """
        Sparse product; terms above <t_cap> or <q_cap> are dropped
        (the truncation is exact on the surviving terms).
        """
        terms: Dict[Tuple[int, int], Fraction] = {}
        for (t1, q1), c1 in self.terms.items():
            for (t2, q2), c2 in other.terms.items():
                dt, dq = t1 + t2, q1 + q2
                if (t_cap is not None and dt > t_cap) or (q_cap is not None and dq > q_cap):
                    continue
                terms[(dt, dq)] = terms.get((dt, dq), Fraction(0)) + c1 * c2
        return TQPoly(terms)

    def scale(self, c: Rational) -> 'TQPoly':
        return TQPoly({key: v * c for key, v in self.terms.items()})

    def evaluate(self, t: Any, q: Any, precision: Optional[int] = None) -> Any:
        """
        Evaluate at (t, q): Horner in q for every t-power, then Horner in t.
        Points are converted to mpmath numbers when <precision> is given.
        """
        if precision is not None:
            with mpmath.workdps(precision):
                return self._evaluate(to_mpf(t), to_mpf(q))
        return self._evaluate(t, q)

    def _evaluate(self, t: Any, q: Any) -> Any:
        acc = 0 * t
        for k in range(self.t_degree, -1, -1):
            acc = acc * t + evaluate(self.t_coefficient(k), q)
        return acc

    def to_dict(self) -> Dict[str, List[List[Any]]]:
        return {"terms": [[dt, dq, str(c)] for dt, dq, c in self.items()]}

    @staticmethod
    def from_dict(data: Mapping[str, Any]) -> 'TQPoly':
        try:
            return TQPoly({(int(dt), int(dq)): Fraction(c) for dt, dq, c in data["terms"]})
        except (KeyError, TypeError, ValueError) as e:
            raise ValidationError(f"Malformed TQPoly serialization: {e}")

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for dt, dq, c in self.items():
            monomial = "*".join(m for m in (
                "" if dt == 0 else ("t" if dt == 1 else f"t^{dt}"),
                "" if dq == 0 else ("q" if dq == 1 else f"q^{dq}")) if m)
            if not monomial:
                parts.append(str(c))
            elif c == 1:
                parts.append(monomial)
            else:
                parts.append(f"{c}*{monomial}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TQPoly({self.format()})"


def to_mpf(x: Any) -> Any:
    """ Convert an int, Fraction or float to an mpmath number at the current precision """
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)

