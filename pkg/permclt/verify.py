"""
Invariant suites behind ``permclt verify``.

Every check is a function of the suite settings returning (passed, detail),
registered under its suite with the @check decorator. A check raising
SkipCheck is reported as skipped; a PermcltError is reported as a failure.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import mpmath
import numpy as np

from permclt.asymptotics import (DEFAULT_PARTITION_CAP, AsymptoticParams, QuadratureSettings,
                                 F_k, G, beta_denominator, beta_type_integral, common_factor,
                                 f_dominating, fixed_point_prefactor, gaussian_identity_check,
                                 l_decomposition, quadform, sigma, target_mgf)
from permclt.combinatorics import CycleType, class_size, divisors, mobius, partitions_of
from permclt.errors import InternalInconsistency, PermcltError, ValidationError
from permclt.exactpoly import QPoly, mul, qbracket
from permclt.genfun import (classes_with_fixed_points, cycle_count_expectation,
                            cycle_index_expectation, eulerian_specialization, f_iaq, j_series,
                            joint_gf, k_bounds, mgf_exact, mixture_mgf, union_mgf)
from permclt.montecarlo import (DEFAULT_BATCH_ELEMENTS, DEFAULT_BIT_GENERATOR,
                                chi_square_uniformity, make_generator, normalized_moments,
                                run_sampling, sample_batch)
from permclt.oracle import (DEFAULT_ORACLE_CAP, JointDistribution, Permutation, class_members,
                            cycle_type_of, descent_number, joint_distribution_bruteforce,
                            major_index, symmetric_group_tables)
from permclt.utils import resolve_precision, timed

SUITE_NAMES = ("combinatorics", "exactpoly", "genfun", "oracle", "montecarlo", "asymptotics")

# n-cycle sizes of the convergence trend checks
TREND_SIZES = (8, 16, 24, 32)
# Above this many samples the moment checks run at n = 4000 with 2% tolerance
FULL_SCALE_SAMPLES = 1_000_000

PASS = "pass"
FAIL = "fail"
SKIP = "skip"


class SkipCheck(Exception):
    """ The check cannot run with the current settings """


@dataclass(frozen=True)
class VerifySettings:
    max_n: int = 8
    oracle_cap: int = DEFAULT_ORACLE_CAP
    samples: int = 100000
    seed: int = 42
    workers: int = 1
    streams: int = 0
    rng_name: str = DEFAULT_BIT_GENERATOR
    batch_elements: int = DEFAULT_BATCH_ELEMENTS
    precision: Optional[int] = None
    quadrature: QuadratureSettings = QuadratureSettings()
    partition_cap: int = DEFAULT_PARTITION_CAP
    epsilon: Optional[float] = None

    @property
    def oracle_n(self) -> int:
        return min(self.max_n, self.oracle_cap)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    status: str
    detail: str
    # Failed on an internal inconsistency rather than a violated property
    fatal: bool = False

    @property
    def passed(self) -> bool:
        return self.status != FAIL


CheckFunction = Callable[[VerifySettings], Tuple[bool, str]]
SUITES: Dict[str, List[Tuple[str, CheckFunction]]] = {name: [] for name in SUITE_NAMES}


def check(suite: str, name: str) -> Callable[[CheckFunction], CheckFunction]:
    def register(func: CheckFunction) -> CheckFunction:
        SUITES[suite].append((name, func))
        return func
    return register


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a)


def _strictly_decreasing(values: List[float]) -> bool:
    return all(later < earlier for earlier, later in zip(values, values[1:]))


def _trend_sizes(settings: VerifySettings) -> List[int]:
    sizes = [n for n in TREND_SIZES if n <= settings.max_n]
    if len(sizes) < 2:
        raise SkipCheck(f"needs --max-n >= {TREND_SIZES[1]}")
    return sizes


def eulerian_numbers(n: int) -> List[int]:
    """
    Number of permutations of S_n with descent number d, for d = 0..n
    (entry 0 is always 0)
    """
    return [0] + [sum((-1) ** j * math.comb(n + 1, j) * (d - j) ** n for j in range(d + 1))
                  for d in range(1, n + 1)]


# combinatorics

@check("combinatorics", "class sizes sum to n!")
def _class_sizes(settings: VerifySettings) -> Tuple[bool, str]:
    for n in range(1, settings.max_n + 1):
        total = sum(class_size(lam) for lam in partitions_of(n))
        if total != math.factorial(n):
            return False, f"n={n}: classes sum to {total}"
    return True, f"n <= {settings.max_n}"


@check("combinatorics", "partition counts")
def _partition_counts(settings: VerifySettings) -> Tuple[bool, str]:
    # p(n) by Euler's pentagonal number recurrence
    top = max(settings.max_n, 20)
    p = [1] + [0] * top
    for n in range(1, top + 1):
        k = 1
        while True:
            terms = [g for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2) if g <= n]
            if not terms:
                break
            sign = 1 if k % 2 else -1
            p[n] += sign * sum(p[n - g] for g in terms)
            k += 1
    for n in range(1, top + 1):
        found = len(partitions_of(n))
        if found != p[n]:
            return False, f"{found} partitions of {n}, expected {p[n]}"
    return True, f"n <= {top}"


@check("combinatorics", "mobius sums over divisors")
def _mobius_sums(settings: VerifySettings) -> Tuple[bool, str]:
    for i in range(1, 1001):
        total = sum(mobius(d) for d in divisors(i))
        if total != (1 if i == 1 else 0):
            return False, f"sum of mu over divisors of {i} is {total}"
    return True, "i <= 1000"


# exactpoly

@check("exactpoly", "packed product against schoolbook")
def _packed_product(settings: VerifySettings) -> Tuple[bool, str]:
    rng = np.random.default_rng(settings.seed)
    for length in (3, 64, 200):
        a = [int(v) for v in rng.integers(-10 ** 6, 10 ** 6, size=length)]
        b = [int(v) for v in rng.integers(-10 ** 6, 10 ** 6, size=length // 2 + 1)]
        expected = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                expected[i + j] += x * y
        if mul(QPoly(a), QPoly(b)) != QPoly(expected):
            return False, f"mismatch at length {length}"
    return True, "both sides of the packing threshold"


@check("exactpoly", "q-bracket telescopes")
def _qbracket_telescopes(settings: VerifySettings) -> Tuple[bool, str]:
    one_minus_q = QPoly([1, -1])
    for a in range(1, 31):
        if qbracket(a) * one_minus_q != QPoly([1] + [0] * (a - 1) + [-1]):
            return False, f"[{a}]_q (1 - q) != 1 - q^{a}"
        if qbracket(a, 3).evaluate(1) != a:
            return False, f"[{a}]_(q^3) at q = 1 is not {a}"
    return True, "a <= 30"


# genfun

@check("genfun", "f_{i,a} from necklace counts")
def _f_from_necklaces(settings: VerifySettings) -> Tuple[bool, str]:
    for i in range(1, 9):
        for a in range(1, 6):
            if f_iaq(i, a) != j_series(i, a):
                return False, f"i={i}, a={a}: {f_iaq(i, a)} != {j_series(i, a)}"
    return True, "i <= 8, a <= 5"


@check("genfun", "f_{i,a} counts are nonnegative integers")
def _f_nonnegative(settings: VerifySettings) -> Tuple[bool, str]:
    for i in range(1, 11):
        for a in range(1, 11):
            f = f_iaq(i, a)
            if not f.is_integral or any(c < 0 for c in f.integer_coeffs()):
                return False, f"i={i}, a={a}: {f}"
    return True, "i <= 10, a <= 10"


@check("genfun", "necklace sandwich of f_{i,a}")
def _f_sandwich(settings: VerifySettings) -> Tuple[bool, str]:
    # [a]^i - (i/2)[a]^(i/2) <= i f <= [a]^i; the half power is removed by squaring
    points = [Fraction(k, 10) for k in range(11)]
    for i in range(1, 11):
        for a in range(1, 21):
            f = f_iaq(i, a)
            bracket = qbracket(a)
            for q in points:
                top = bracket.evaluate(q) ** i
                value = i * f.evaluate(q)
                gap = top - value
                if value > top or (gap > 0 and 4 * gap * gap > i * i * top):
                    return False, f"i={i}, a={a}, q={q}"
    return True, "i <= 10, a <= 20, q in {0, 1/10, ..., 1}"


@check("genfun", "bounds on the per-cycle-length factor")
def _k_bounds(settings: VerifySettings) -> Tuple[bool, str]:
    for i in range(1, 5):
        for m in range(1, 4):
            lam = CycleType.from_counts({i: m})
            for a in range(1, 6):
                for q in (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10), Fraction(1)):
                    bounds = k_bounds(lam, i, a, q)
                    if not bounds.holds():
                        return False, f"i={i}, m={m}, a={a}, q={q}: {bounds}"
    return True, "i <= 4, m <= 3, a <= 5"


@check("genfun", "cycle count expectation")
def _cycle_counts(settings: VerifySettings) -> Tuple[bool, str]:
    for size in range(0, 9):
        for x in range(0, 6):
            constant = {k: QPoly([x]) for k in range(1, size + 1)}
            if cycle_index_expectation(size, constant) != QPoly([cycle_count_expectation(size, x)]):
                return False, f"size={size}, x={x}"
    return True, "size <= 8, x <= 5"


@check("genfun", "generating function against brute force")
def _gf_against_oracle(settings: VerifySettings) -> Tuple[bool, str]:
    classes = 0
    for n in range(1, settings.oracle_n + 1):
        for lam in partitions_of(n):
            expected = joint_distribution_bruteforce(lam, settings.oracle_cap).to_tqpoly()
            if joint_gf(lam).gf != expected:
                return False, f"class {lam}"
            classes += 1
    return True, f"{classes} classes, n <= {settings.oracle_n}"


@check("genfun", "q = 1 specialization")
def _q1_specialization(settings: VerifySettings) -> Tuple[bool, str]:
    top = min(settings.max_n, 8)
    for n in range(1, top + 1):
        for lam in partitions_of(n):
            if eulerian_specialization(lam) != joint_gf(lam).gf.specialize_q1():
                return False, f"class {lam}"
    return True, f"n <= {top}"


@check("genfun", "Eulerian numbers from the class sums")
def _eulerian_numbers(settings: VerifySettings) -> Tuple[bool, str]:
    top = min(settings.max_n, 8)
    for n in range(1, top + 1):
        total = QPoly()
        for lam in partitions_of(n):
            total = total + eulerian_specialization(lam)
        if total != QPoly(eulerian_numbers(n)):
            return False, f"n={n}: {total.format('t')}"
    return True, f"n <= {top}"


@check("genfun", "union of classes with two fixed points")
def _union_mixture(settings: VerifySettings) -> Tuple[bool, str]:
    sizes = [n for n in (8, 9) if n <= settings.max_n] or [min(settings.max_n, 9)]
    if sizes[0] < 3:
        raise SkipCheck("needs --max-n >= 3")
    digits = resolve_precision(settings.precision)
    for n in sizes:
        classes = classes_with_fixed_points(n, 2)
        for s, r in ((1.0, 1.0), (0.5, 2.0)):
            with mpmath.workdps(digits):
                mixture = mixture_mgf(classes, s, r, digits)
                pooled = union_mgf(classes, s, r, digits)
                if abs(mixture - pooled) > abs(pooled) * mpmath.mpf(10) ** (5 - digits):
                    return False, f"n={n}, (s, r)=({s}, {r}): {mixture} != {pooled}"
    return True, f"n in {sizes}"


@check("genfun", "exact m.g.f. of n-cycles approaches its target")
def _mgf_trend(settings: VerifySettings) -> Tuple[bool, str]:
    sizes = _trend_sizes(settings)
    target = float(target_mgf(0, 1, 1))
    errors = [abs(float(mgf_exact(CycleType.from_counts({n: 1}), 1.0, 1.0, settings.precision)) - target)
              for n in sizes]
    detail = ", ".join(f"n={n}: {e:.3e}" for n, e in zip(sizes, errors))
    return _strictly_decreasing(errors) and errors[-1] < 0.1, detail


# oracle

@check("oracle", "table totals are class sizes")
def _oracle_totals(settings: VerifySettings) -> Tuple[bool, str]:
    for n in range(1, settings.oracle_n + 1):
        for lam in partitions_of(n):
            dist = joint_distribution_bruteforce(lam, settings.oracle_cap)
            if dist.total() != class_size(lam):
                return False, f"class {lam}: {dist.total()}"
    return True, f"n <= {settings.oracle_n}"


@check("oracle", "descent marginal over S_n")
def _descent_marginal(settings: VerifySettings) -> Tuple[bool, str]:
    for n in range(1, min(settings.oracle_n, 9) + 1):
        marginal: Dict[int, int] = {}
        for dist in symmetric_group_tables(n).values():
            for d, c in dist.d_marginal().items():
                marginal[d] = marginal.get(d, 0) + c
        expected = eulerian_numbers(n)
        if any(marginal.get(d, 0) != expected[d] for d in range(n + 1)):
            return False, f"n={n}: {sorted(marginal.items())}"
    return True, f"n <= {min(settings.oracle_n, 9)}"


@check("oracle", "major index marginal over S_n")
def _maj_marginal(settings: VerifySettings) -> Tuple[bool, str]:
    for n in range(1, min(settings.oracle_n, 9) + 1):
        enumerated: Dict[int, int] = {}
        computed: Dict[int, int] = {}
        for lam, dist in symmetric_group_tables(n).items():
            for maj, c in dist.maj_marginal().items():
                enumerated[maj] = enumerated.get(maj, 0) + c
            exact = JointDistribution.from_tqpoly(lam, joint_gf(lam).gf)
            for maj, c in exact.maj_marginal().items():
                computed[maj] = computed.get(maj, 0) + c
        if enumerated != computed:
            return False, f"n={n}"
    return True, f"n <= {min(settings.oracle_n, 9)}"


@check("oracle", "class generator against the full sweep")
def _class_generator(settings: VerifySettings) -> Tuple[bool, str]:
    top = min(settings.oracle_n, 7)
    for n in range(1, top + 1):
        tables = symmetric_group_tables(n)
        for lam in partitions_of(n):
            members = list(class_members(lam))
            if len(set(p.one_line for p in members)) != class_size(lam):
                return False, f"class {lam}: {len(members)} members"
            if any(cycle_type_of(p) != lam for p in members):
                return False, f"class {lam}: member of another class"
            counts: Dict[Tuple[int, int], int] = {}
            for p in members:
                key = (descent_number(p), major_index(p))
                counts[key] = counts.get(key, 0) + 1
            if counts != dict(tables[lam].counts):
                return False, f"class {lam}: tallies differ"
    return True, f"n <= {top}"


# montecarlo

@check("montecarlo", "samples lie in the requested class")
def _sample_membership(settings: VerifySettings) -> Tuple[bool, str]:
    n = min(settings.max_n, 6)
    rng = make_generator(np.random.SeedSequence(settings.seed), settings.rng_name)
    for lam in partitions_of(n):
        for row in sample_batch(lam, 1000, rng):
            p = Permutation(tuple(int(v) for v in row))
            if cycle_type_of(p) != lam:
                return False, f"class {lam}: sampled {p}"
    return True, f"every class of S_{n}, 1000 draws each"


@check("montecarlo", "chi-square uniformity on S_6")
def _uniformity(settings: VerifySettings) -> Tuple[bool, str]:
    n = min(settings.max_n, 6)
    worst = 1.0
    for lam in partitions_of(n):
        _, p_value = chi_square_uniformity(lam, settings.samples, settings.seed, settings.rng_name)
        worst = min(worst, p_value)
        if p_value <= 1e-3:
            return False, f"class {lam}: p = {p_value:.3e}"
    return True, f"every class of S_{n}, {settings.samples} draws, min p = {worst:.3e}"


@check("montecarlo", "sampled m.g.f. against exact values")
def _sampled_mgf(settings: VerifySettings) -> Tuple[bool, str]:
    n = min(settings.max_n, 9)
    if n < 4:
        raise SkipCheck("needs --max-n >= 4")
    grid = ((1.0, 1.0), (0.5, 2.0))
    worst = 0.0
    for lam in (CycleType.from_counts({n: 1}), CycleType.from_counts({1: 2, n - 2: 1})):
        stats = run_sampling(lam, settings.samples, grid, settings.seed, settings.workers,
                             settings.streams, settings.rng_name, settings.batch_elements)
        for (s, r), mean, stderr in zip(grid, stats.mgf_means(), stats.mgf_stderrs()):
            gap = abs(mean - float(mgf_exact(lam, s, r, settings.precision)))
            worst = max(worst, gap / stderr if stderr else 0.0)
            if gap > 5 * stderr:
                return False, f"class {lam} at ({s}, {r}): off by {gap / stderr:.1f} standard errors"
    return True, f"n={n}, worst deviation {worst:.2f} standard errors"


@check("montecarlo", "stream merge is independent of worker count")
def _merge_determinism(settings: VerifySettings) -> Tuple[bool, str]:
    lam = CycleType.from_counts({1: 1, 3: 2})
    grid = ((1.0, 1.0),)
    serial = run_sampling(lam, 5000, grid, settings.seed, 1, 3, settings.rng_name, 700)
    parallel = run_sampling(lam, 5000, grid, settings.seed, 2, 3, settings.rng_name, 700)
    return serial == parallel, "3 streams on 1 and 2 workers"


def _moment_check(lam: CycleType, settings: VerifySettings, tolerance: float) -> Tuple[bool, str]:
    stats = run_sampling(lam, settings.samples, (), settings.seed, settings.workers,
                         settings.streams, settings.rng_name, settings.batch_elements)
    moments = normalized_moments(stats)
    w11, _, w22 = moments.cov_W
    detail = (f"n={lam.n}: Var W1={w11:.5f}, Var W2={w22:.5f}, "
              f"corr={moments.correlation:.4f}")
    ok = (_relative(w11, 1 / 12) <= tolerance and _relative(w22, 1 / 36) <= tolerance
          and abs(moments.correlation - math.sqrt(3) / 2) <= tolerance)
    return ok, detail


def _moment_scale(settings: VerifySettings) -> Tuple[int, float]:
    if settings.samples >= FULL_SCALE_SAMPLES:
        return 4000, 0.02
    return 400, 0.05


@check("montecarlo", "limiting covariance of n-cycles")
def _ncycle_moments(settings: VerifySettings) -> Tuple[bool, str]:
    n, tolerance = _moment_scale(settings)
    return _moment_check(CycleType.from_counts({n: 1}), settings, tolerance)


@check("montecarlo", "limiting covariance of fixed-point-free involutions")
def _involution_moments(settings: VerifySettings) -> Tuple[bool, str]:
    n, tolerance = _moment_scale(settings)
    return _moment_check(CycleType.from_counts({2: n // 2}), settings, tolerance)


# asymptotics

@check("asymptotics", "covariance matrix entries")
def _sigma_entries(settings: VerifySettings) -> Tuple[bool, str]:
    for k in range(101):
        m = sigma(Fraction(k, 100))
        if m.s12 != m.s11 / 2 or m.s11 < 0 or m.s22 < 0 or m.det < 0:
            return False, f"alpha={Fraction(k, 100)}"
    if sigma(1).as_tuple() != (0, 0, 0):
        return False, "sigma(1) is not zero"
    return True, "alpha in {0, 1/100, ..., 1}"


@check("asymptotics", "dominating function inequalities")
def _dominating(settings: VerifySettings) -> Tuple[bool, str]:
    sizes = (1, 2, 3, 5, 10, 50, 100, 1000, 10000)
    zs = [-5 + k / 10 for k in range(101)]
    for n in sizes:
        for z in zs:
            value = f_dominating(n, z)
            if z < 0 and value > math.exp(-z * z / 2) * (1 + 1e-12):
                return False, f"n={n}, z={z}: f_n(z) > exp(-z^2/2)"
            if z >= 0:
                for m in sizes:
                    if m <= n and value > f_dominating(m, z) * (1 + 1e-12):
                        return False, f"m={m}, n={n}, z={z}: f_n(z) > f_m(z)"
    return True, "n <= 10^4, z in [-5, 5]"


@check("asymptotics", "beta integral closed form against quadrature")
def _beta_closed_form(settings: VerifySettings) -> Tuple[bool, str]:
    worst = 0.0
    for n in (1, 2, 5, 10, 50, 100, 200):
        for s, r in ((1.0, 2.0), (1.0, 1.0), (2.0, 1.0)):
            params = AsymptoticParams.build(n, s, r)
            numeric = float(beta_type_integral(params, 1.0, None, settings.quadrature))
            closed = float(beta_denominator(params, settings.precision))
            worst = max(worst, _relative(numeric, closed))
    return worst <= 1e-10, f"worst relative error {worst:.3e}"


@check("asymptotics", "gaussian integral identity")
def _gaussian_identity(settings: VerifySettings) -> Tuple[bool, str]:
    worst = 0.0
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        for s, r in ((1.0, 1.0), (1.0, 2.0), (0.5, 0.3), (2.0, 0.5)):
            value, closed = gaussian_identity_check(alpha, s, r, settings.quadrature)
            worst = max(worst, _relative(value, closed))
    return worst <= 1e-8, f"worst relative error {worst:.3e}"


@check("asymptotics", "continuity of the target in alpha")
def _target_continuity(settings: VerifySettings) -> Tuple[bool, str]:
    h = 1e-4
    values = (0.1, 0.5, 1.0, 2.0)
    worst = 0.0
    for s in values:
        for r in values:
            for k in range(100):
                alpha = k / 100
                step = abs(float(target_mgf(alpha + h, s, r)) - float(target_mgf(alpha, s, r)))
                worst = max(worst, step / h)
    return worst <= 10, f"largest difference quotient {worst:.4f}"


@check("asymptotics", "common factor approaches its asymptotic form")
def _common_factor_trend(settings: VerifySettings) -> Tuple[bool, str]:
    errors = []
    for n in TREND_SIZES:
        exact, asymptotic = common_factor(AsymptoticParams.build(n, 1.0, 1.0), settings.precision)
        errors.append(float(abs(exact - asymptotic) / abs(exact)))
    detail = ", ".join(f"n={n}: {e:.3e}" for n, e in zip(TREND_SIZES, errors))
    return _strictly_decreasing(errors), detail


@check("asymptotics", "small-a bound")
def _small_a_bound(settings: VerifySettings) -> Tuple[bool, str]:
    params = AsymptoticParams.build(30, 1.0, 1.0)
    bound = l_decomposition(params, CycleType.from_counts({30: 1}),
                            settings=settings.quadrature).l_small_bound
    return bound < 1e-8, f"n=30: {bound:.3e}"


@check("asymptotics", "large-a integral against the exact m.g.f.")
def _large_a_trend(settings: VerifySettings) -> Tuple[bool, str]:
    sizes = _trend_sizes(settings)
    scale = math.exp(float(quadform(sigma(0), 1, 1)) / 2)
    errors = []
    for n in sizes:
        lam = CycleType.from_counts({n: 1})
        params = AsymptoticParams.build(n, 1.0, 1.0, settings.epsilon)
        large = l_decomposition(params, lam, partition_cap=settings.partition_cap,
                                settings=settings.quadrature).l_large_numeric
        exact = float(mgf_exact(lam, 1.0, 1.0, settings.precision))
        errors.append(_relative(scale * large, exact))
    detail = ", ".join(f"n={n}: {e:.3e}" for n, e in zip(sizes, errors))
    return _strictly_decreasing(errors) and errors[1] <= 0.15, detail


@check("asymptotics", "G by recurrence and by partitions")
def _g_methods(settings: VerifySettings) -> Tuple[bool, str]:
    n = 40
    params = AsymptoticParams.build(n, 1.0, 1.0)
    for fixed in (1, 2, 5, 10):
        lam = CycleType.from_counts({1: fixed, n - fixed: 1})
        for u in (0.0, 0.3, 0.7):
            by_recurrence = G(params, lam, u, "recurrence")
            by_partitions = G(params, lam, u, "partitions", settings.partition_cap)
            if _relative(by_recurrence, by_partitions) > 1e-12:
                return False, f"fixed={fixed}, u={u}: {by_recurrence} != {by_partitions}"
    return True, "fixed points in {1, 2, 5, 10}"


@check("asymptotics", "fixed-point prefactor")
def _prefactor(settings: VerifySettings) -> Tuple[bool, str]:
    for n in (10, 100, 1000):
        for s, r in ((1.0, 1.0), (0.5, 2.0)):
            params = AsymptoticParams.build(n, s, r)
            for fixed in (1, n // 4, n // 2):
                lam = CycleType.from_counts({1: fixed, n - fixed: 1})
                expected = math.exp(-fixed * fixed * F_k(params, 2, params.theta))
                if _relative(fixed_point_prefactor(params, lam), expected) > 1e-12:
                    return False, f"n={n}, fixed={fixed}"
    return True, "n in {10, 100, 1000}"


@check("asymptotics", "identity class closed form")
def _identity_closed_form(settings: VerifySettings) -> Tuple[bool, str]:
    for n in (1, 4, 16, 32):
        value = float(mgf_exact(CycleType.from_counts({1: n}), 1.0, 1.0, settings.precision))
        if _relative(value, math.exp(-1 / math.sqrt(n))) > 1e-14:
            return False, f"n={n}: {value}"
    return True, "M = exp(-s/sqrt(n)) for n in {1, 4, 16, 32}"


def run_check(suite: str, name: str, func: CheckFunction, settings: VerifySettings) -> CheckResult:
    try:
        with timed("Check %s/%s", suite, name):
            passed, detail = func(settings)
    except SkipCheck as e:
        logging.info("Skipped %s/%s: %s", suite, name, e)
        return CheckResult(suite, name, SKIP, str(e))
    except InternalInconsistency as e:
        logging.error("Internal inconsistency in %s/%s: %s", suite, name, e)
        return CheckResult(suite, name, FAIL, str(e), fatal=True)
    except PermcltError as e:
        logging.error("Check %s/%s failed: %s", suite, name, e)
        return CheckResult(suite, name, FAIL, str(e))
    if not passed:
        logging.error("Check %s/%s failed: %s", suite, name, detail)
    return CheckResult(suite, name, PASS if passed else FAIL, detail)


def run_suite(suite: str, settings: VerifySettings = VerifySettings()) -> List[CheckResult]:
    """
    Run one suite, or every suite when <suite> is "all"
    """
    if suite == "all":
        names = list(SUITE_NAMES)
    elif suite in SUITES:
        names = [suite]
    else:
        raise ValidationError(f"Unknown suite {suite!r}, expected one of {', '.join(SUITE_NAMES)} or all")
    results = []
    for name in names:
        for check_name, func in SUITES[name]:
            results.append(run_check(name, check_name, func, settings))
    failed = sum(1 for r in results if not r.passed)
    logging.info("%d check(s) run, %d failed", len(results), failed)
    return results


def format_table(results: List[CheckResult]) -> str:
    width = max((len(r.suite) + len(r.name) + 1 for r in results), default=0)
    lines = [f"{r.suite + '/' + r.name:<{width}}  {r.status.upper():<4}  {r.detail}" for r in results]
    return "\n".join(lines) + "\n"
