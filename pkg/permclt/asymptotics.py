"""
Numerical side of the central limit theorem for (d, maj) on a conjugacy
class: the limiting covariance, the normalized pair W, and the quantities
behind the m.g.f. estimate at (-s, -r) with t = e^(-s/sqrt(n)),
q = e^(-delta), delta = r / n^(3/2).
"""
import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import mpmath
from scipy.integrate import IntegrationWarning, quad

from permclt.combinatorics import CycleType, centering, iter_multiplicities
from permclt.errors import CapExceeded, QuadratureError, ValidationError
from permclt.exactpoly import to_mpf
from permclt.genfun import mgf_exact
from permclt.montecarlo import DEFAULT_BATCH_ELEMENTS, DEFAULT_BIT_GENERATOR, run_sampling
from permclt.utils import resolve_precision

Real = Union[int, float, Fraction]

DEFAULT_PARTITION_CAP = 60
DEFAULT_EXACT_MAX_N = 32
# Error growth between consecutive rows beyond this many standard errors is flagged
GROWTH_TOLERANCE = 3.0


@dataclass(frozen=True)
class CovMatrix2:
    s11: Any
    s12: Any
    s22: Any

    @property
    def det(self) -> Any:
        return self.s11 * self.s22 - self.s12 * self.s12

    def as_tuple(self) -> Tuple[Any, Any, Any]:
        return self.s11, self.s12, self.s22


@dataclass(frozen=True)
class QuadratureSettings:
    epsabs: float = 1e-12
    epsrel: float = 1e-10
    limit: int = 200


def sigma(alpha: Real) -> CovMatrix2:
    """
    Limiting covariance of W for fixed-point density <alpha>. Exact for
    int/Fraction input, float otherwise.
    """
    if not 0 <= alpha <= 1:
        raise ValidationError(f"Fixed-point density must lie in [0, 1], got {alpha}")
    a: Any = Fraction(alpha) if isinstance(alpha, (int, Fraction)) else float(alpha)
    common = 1 - 4 * a ** 3 + 3 * a ** 4
    return CovMatrix2(common / 12, common / 24, (1 - a ** 3) / 36)


def quadform(m: CovMatrix2, s: Real, r: Real) -> Any:
    return s * s * m.s11 + 2 * s * r * m.s12 + r * r * m.s22


def target_mgf(alpha: Real, s: Real, r: Real, precision: Optional[int] = None) -> Any:
    """ exp(quadform(sigma(alpha), s, r) / 2) """
    value = quadform(sigma(alpha), s, r)
    with mpmath.workdps(resolve_precision(precision)):
        return mpmath.exp(to_mpf(value) / 2)


def l_large_limit(alpha: Real, s: Real, r: Real) -> float:
    """ Limit of the large-a part of the normalized sum: exp((Sigma_alpha - Sigma_0)(s, r) / 2) """
    difference = quadform(sigma(alpha), s, r) - quadform(sigma(0), s, r)
    return math.exp(float(difference) / 2)


def normalize_W(lam: CycleType, d: int, maj: int) -> Tuple[float, float]:
    n = lam.n
    if n < 1:
        raise ValidationError("normalize_W needs n >= 1")
    center_d, center_maj = centering(n, lam.alpha1)
    return float(d - center_d) / math.sqrt(n), float(maj - center_maj) / n ** 1.5


def f_dominating(n: int, z: float) -> float:
    """
    f_n(z) = (1 + z/sqrt(n))_+^n e^(-sqrt(n) z), evaluated in log space
    """
    if n < 1:
        raise ValidationError(f"f_dominating needs n >= 1, got {n}")
    root = math.sqrt(n)
    if z <= -root:
        return 0.0
    return math.exp(n * math.log1p(z / root) - root * z)


def default_epsilon(s: float, r: float) -> float:
    """ Makes 2e(s+r)epsilon/r equal to 1/2 """
    return r / (4 * math.e * (s + r))


@dataclass(frozen=True)
class AsymptoticParams:
    n: int
    s: float
    r: float
    epsilon: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"n must be positive, got {self.n}")
        if self.s <= 0 or self.r <= 0:
            raise ValidationError(f"s and r must be positive, got s={self.s}, r={self.r}")
        if self.epsilon <= 0:
            raise ValidationError(f"epsilon must be positive, got {self.epsilon}")
        if self.small_ratio >= 1:
            raise ValidationError(
                    f"epsilon={self.epsilon} violates 2e(s+r)epsilon/r < 1 (got {self.small_ratio:.6g})")

    @staticmethod
    def build(n: int, s: float, r: float, epsilon: Optional[float] = None) -> 'AsymptoticParams':
        s, r = float(s), float(r)
        if s <= 0 or r <= 0:
            raise ValidationError(f"s and r must be positive, got s={s}, r={r}")
        return AsymptoticParams(n, s, r, default_epsilon(s, r) if epsilon is None else float(epsilon))

    @property
    def small_ratio(self) -> float:
        return 2 * math.e * (self.s + self.r) * self.epsilon / self.r

    @property
    def delta(self) -> float:
        return self.r / self.n ** 1.5

    @property
    def t(self) -> float:
        return math.exp(-self.s / math.sqrt(self.n))

    @property
    def q(self) -> float:
        return math.exp(-self.delta)

    @property
    def theta(self) -> float:
        return self.s / (self.s + self.r)

    @property
    def beta_exponent(self) -> float:
        """ sn/r, so that the beta weight is u^(sn/r - 1) (1-u)^n """
        return self.s * self.n / self.r


def F_k(params: AsymptoticParams, k: int, u: float) -> float:
    """ (delta^(k-1) / k^2) (1 - u^k) / (1 - u)^k """
    if k < 1:
        raise ValidationError(f"F_k needs k >= 1, got {k}")
    if not 0 <= u < 1:
        raise ValidationError(f"F_k needs u in [0, 1), got {u}")
    if k == 1:
        return 1.0
    log_scale = (k - 1) * math.log(params.delta) - k * math.log1p(-u)
    return math.exp(log_scale) * (1 - u ** k) / (k * k)


def fixed_point_prefactor(params: AsymptoticParams, lam: CycleType) -> float:
    """ t^(alpha1^2 n / 2) q^(alpha1^2 n^2 / 4) """
    fixed = lam.fixed_points
    return math.exp(-params.s * fixed * fixed / (2 * params.n * math.sqrt(params.n))
                    - params.delta * fixed * fixed / 4)


def G(params: AsymptoticParams, lam: CycleType, u: float, method: str = "recurrence",
      partition_cap: int = DEFAULT_PARTITION_CAP) -> float:
    """
    prefactor * lam1! * sum_{mu |- lam1} prod_k F_k(u)^mu_k / mu_k!

    "recurrence" evaluates the partition sum as a cycle index with
    x_k = k F_k; "partitions" enumerates mu directly and is capped.
    """
    if lam.n != params.n:
        raise ValidationError(f"Class {lam} is not a class of S_{params.n}")
    fixed = lam.fixed_points
    if fixed == 0:
        return 1.0
    if not 0 <= u < 1:
        raise ValidationError(f"G needs u in [0, 1), got {u}")
    with mpmath.workdps(20):
        f = [mpmath.mpf(0)] + [mpmath.mpf(F_k(params, k, u)) for k in range(1, fixed + 1)]
        if method == "recurrence":
            z = [mpmath.mpf(1)]
            for m in range(1, fixed + 1):
                z.append(mpmath.fsum(k * f[k] * z[m - k] for k in range(1, m + 1)) / m)
            total = z[fixed]
        elif method == "partitions":
            if fixed > partition_cap:
                raise CapExceeded("G partition enumeration", partition_cap, fixed)
            total = mpmath.fsum(
                    mpmath.fprod(f[k] ** m / mpmath.factorial(m) for k, m in enumerate(mu, start=1) if m)
                    for mu in iter_multiplicities(fixed))
        else:
            raise ValidationError(f"Unknown G method {method!r}, expected 'recurrence' or 'partitions'")
        return float(fixed_point_prefactor(params, lam) * mpmath.factorial(fixed) * total)


def G_approx(params: AsymptoticParams, lam: CycleType, u: float) -> float:
    """
    exp(lam1^2 (F_2(u) - F_2(theta)) + lam1^3 (F_3(u) - 2 F_2(u)^2))
    """
    fixed = lam.fixed_points
    f2 = F_k(params, 2, u)
    exponent = (fixed ** 2 * (f2 - F_k(params, 2, params.theta))
                + fixed ** 3 * (F_k(params, 3, u) - 2 * f2 * f2))
    return math.exp(exponent)


def integrate(func: Callable[[float], float], a: float, b: float,
              settings: QuadratureSettings = QuadratureSettings(),
              points: Optional[Sequence[float]] = None) -> float:
    """
    Adaptive Gauss-Kronrod quadrature (QUADPACK).

    :raise QuadratureError: when the requested tolerance is not reached
    """
    kwargs: Dict[str, Any] = {"epsabs": settings.epsabs, "epsrel": settings.epsrel, "limit": settings.limit}
    if points and math.isfinite(a) and math.isfinite(b):
        kwargs["points"] = list(points)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, error = quad(func, a, b, **kwargs)
    requested = max(settings.epsabs, settings.epsrel * abs(value))
    if any(issubclass(w.category, IntegrationWarning) for w in caught) or error > requested:
        raise QuadratureError(error, requested)
    logging.debug("Quadrature over [%g, %g]: %.17g (error estimate %.3e)", a, b, value, error)
    return float(value)


def beta_type_integral(params: AsymptoticParams, upper: float = 1.0,
                       weight: Optional[Callable[[float], float]] = None,
                       settings: QuadratureSettings = QuadratureSettings(),
                       precision: Optional[int] = None) -> Any:
    """
    int_0^upper u^(sn/r - 1) (1-u)^n weight(u) du by quadrature.

    The integrand is divided by the value of the beta weight at its mode
    before integrating, and the scale is restored with mpmath.
    """
    a_exp = params.beta_exponent - 1
    n = params.n
    mode = min(a_exp / (a_exp + n), upper) if a_exp > 0 else 0.0
    log_peak = a_exp * math.log(mode) + n * math.log1p(-mode) if mode > 0 else 0.0

    def integrand(u: float) -> float:
        if u <= 0:
            return 0.0
        value = math.exp(a_exp * math.log(u) + n * math.log1p(-u) - log_peak)
        return value * weight(u) if weight is not None else value

    points = [mode] if 0 < mode < upper else None
    value = integrate(integrand, 0.0, upper, settings, points)
    with mpmath.workdps(resolve_precision(precision)):
        return mpmath.exp(log_peak) * value


def beta_denominator(params: AsymptoticParams, precision: Optional[int] = None) -> Any:
    """ int_0^1 u^(sn/r - 1) (1-u)^n du = B(sn/r, n+1), closed form """
    with mpmath.workdps(resolve_precision(precision)):
        return mpmath.beta(mpmath.mpf(params.s) * params.n / params.r, params.n + 1)


@dataclass(frozen=True)
class LDecomposition:
    l_small_bound: float
    l_large_numeric: float
    epsilon: float


def l_decomposition(params: AsymptoticParams, lam: CycleType, method: str = "recurrence",
                    partition_cap: int = DEFAULT_PARTITION_CAP,
                    settings: QuadratureSettings = QuadratureSettings()) -> LDecomposition:
    """
    Bound on the small-a part, and the large-a part as a ratio of integrals
    with G evaluated pointwise.
    """
    if lam.n != params.n:
        raise ValidationError(f"Class {lam} is not a class of S_{params.n}")
    small = math.sqrt(params.n) * params.small_ratio ** (params.n + 1)
    upper = math.exp(-params.epsilon)
    if lam.fixed_points == 0:
        weight = None
    else:
        def weight(u: float) -> float:
            return G(params, lam, u, method, partition_cap)
    numerator = beta_type_integral(params, upper, weight, settings)
    large = float(numerator / beta_denominator(params))
    logging.debug("L decomposition of %s at n=%d: small <= %.3e, large = %.17g",
                  lam, params.n, small, large)
    return LDecomposition(l_small_bound=small, l_large_numeric=large, epsilon=params.epsilon)


def common_factor(params: AsymptoticParams, precision: Optional[int] = None) -> Tuple[Any, Any]:
    """
    :return: ((1/n!) prod_{j=0..n} (1 - t q^j), and its asymptotic form
        t^(n/2) q^(n^2/4) e^(Sigma_0(s,r)/2) delta^(n+1) / B(sn/r, n+1))
    """
    n = params.n
    digits = resolve_precision(precision)
    with mpmath.workdps(digits):
        root = mpmath.sqrt(n)
        t = mpmath.exp(-mpmath.mpf(params.s) / root)
        delta = mpmath.mpf(params.r) / (n * root)
        q = mpmath.exp(-delta)
        exact = mpmath.fprod(1 - t * q ** j for j in range(n + 1)) / mpmath.factorial(n)
        asymptotic = (t ** (mpmath.mpf(n) / 2) * q ** (mpmath.mpf(n) ** 2 / 4)
                      * mpmath.exp(to_mpf(quadform(sigma(0), Fraction(params.s), Fraction(params.r))) / 2)
                      * delta ** (n + 1) / beta_denominator(params, digits))
        return exact, asymptotic


def gaussian_identity_check(alpha: float, s: float, r: float,
                            settings: QuadratureSettings = QuadratureSettings()) -> Tuple[float, float]:
    """
    int exp(-z^2/2 + b z - c) dz by quadrature against the closed form
    sqrt(2 pi) exp((Sigma_alpha - Sigma_0)(s, r) / 2), with
    b = (alpha^2 / 2) sqrt(s (r + s)) and c = (alpha^3 / 72)(r^2 + 12rs + 12s^2)
    """
    if not 0 <= alpha <= 1:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    if s <= 0 or r <= 0:
        raise ValidationError(f"s and r must be positive, got s={s}, r={r}")
    b = alpha ** 2 / 2 * math.sqrt(s * (r + s))
    c = alpha ** 3 / 72 * (r * r + 12 * r * s + 12 * s * s)
    value = integrate(lambda z: math.exp(-z * z / 2 + b * z - c), -math.inf, math.inf, settings)
    closed = math.sqrt(2 * math.pi) * l_large_limit(float(alpha), s, r)
    return value, closed


@dataclass(frozen=True)
class ConvergenceBudgets:
    exact_max_n: int = DEFAULT_EXACT_MAX_N
    samples: int = 100000
    seed: int = 42
    workers: int = 1
    streams: int = 0
    rng_name: str = DEFAULT_BIT_GENERATOR
    batch_elements: int = DEFAULT_BATCH_ELEMENTS
    precision: Optional[int] = None
    # cut of the a-sum; r / (4e(s+r)) when None
    epsilon: Optional[float] = None
    quadrature: QuadratureSettings = QuadratureSettings()
    partition_cap: int = DEFAULT_PARTITION_CAP


@dataclass(frozen=True)
class ConvergenceRow:
    lam: CycleType
    n: int
    alpha1: Fraction
    source: str
    mgf: float
    target: float
    abs_err: float
    err_times_n16: float
    stderr: float
    growth_flag: bool = False
    # exp(Sigma_0(s, r) / 2) times the large-a integral, and the small-a bound;
    # exact rows only
    mgf_large_a: Optional[float] = None
    small_a_bound: Optional[float] = None


def convergence_report(family: Sequence[CycleType], s: float, r: float,
                       budgets: ConvergenceBudgets = ConvergenceBudgets()) -> List[ConvergenceRow]:
    """
    One row per class: exact m.g.f. up to <exact_max_n>, sampled above.
    Exact rows also carry the split of the a-sum at <budgets.epsilon>.
    A row is flagged when its error exceeds the previous one by more than
    the sampling noise allows.
    """
    if not family:
        raise ValidationError("Empty family")
    for previous, current in zip(family, family[1:]):
        if current.n < previous.n:
            raise ValidationError(f"Family must be ordered by increasing n ({previous} before {current})")
    rows: List[ConvergenceRow] = []
    scale = math.exp(float(quadform(sigma(0), Fraction(s), Fraction(r))) / 2)
    if budgets.epsilon is not None and (s <= 0 or r <= 0):
        raise ValidationError("epsilon only applies to positive s and r")
    for lam in family:
        n = lam.n
        split: Optional[LDecomposition] = None
        if n <= budgets.exact_max_n:
            value = float(mgf_exact(lam, s, r, budgets.precision))
            source, stderr = "exact", 0.0
            if s > 0 and r > 0:
                split = _split_row(lam, s, r, budgets)
        else:
            stats = run_sampling(lam, budgets.samples, [(s, r)], budgets.seed, budgets.workers,
                                 budgets.streams, budgets.rng_name, budgets.batch_elements)
            value, stderr = stats.mgf_means()[0], stats.mgf_stderrs()[0]
            source = "sampled"
        target = float(target_mgf(lam.alpha1, Fraction(s), Fraction(r), budgets.precision))
        abs_err = abs(value - target)
        flag = False
        if rows:
            last = rows[-1]
            if abs_err - last.abs_err > GROWTH_TOLERANCE * (stderr + last.stderr):
                flag = True
                logging.warning("Error grows from %.3e (n=%d) to %.3e (n=%d) beyond sampling noise",
                                last.abs_err, last.n, abs_err, n)
        rows.append(ConvergenceRow(lam=lam, n=n, alpha1=lam.alpha1, source=source, mgf=value,
                                   target=target, abs_err=abs_err,
                                   err_times_n16=abs_err * n ** (1 / 6), stderr=stderr,
                                   growth_flag=flag,
                                   mgf_large_a=None if split is None else scale * split.l_large_numeric,
                                   small_a_bound=None if split is None else split.l_small_bound))
        logging.info("%s n=%d (%s): M=%.17g target=%.17g", lam, n, source, value, target)
    return rows


def _split_row(lam: CycleType, s: float, r: float,
               budgets: ConvergenceBudgets) -> Optional[LDecomposition]:
    params = AsymptoticParams.build(lam.n, s, r, budgets.epsilon)
    try:
        return l_decomposition(params, lam, partition_cap=budgets.partition_cap,
                               settings=budgets.quadrature)
    except (QuadratureError, CapExceeded) as e:
        logging.warning("No a-sum split for %s: %s", lam, e)
        return None


def _parse_sizes(text: str) -> List[int]:
    try:
        sizes = [int(x) for x in text.split(',') if x.strip()]
    except ValueError:
        raise ValidationError(f"Malformed list of sizes {text!r}")
    if not sizes or any(n < 1 for n in sizes):
        raise ValidationError(f"Sizes must be positive integers, got {text!r}")
    return sizes


def fixed_density_class(n: int, alpha: Fraction) -> CycleType:
    """
    floor(alpha n) fixed points and one cycle on the other points; a single
    leftover point is made fixed too
    """
    fixed = math.floor(alpha * n)
    rest = n - fixed
    if rest == 1:
        fixed, rest = n, 0
    counts = {1: fixed}
    if rest:
        counts[rest] = counts.get(rest, 0) + 1
    return CycleType.from_counts(counts)


def parse_family(spec: str) -> List[CycleType]:
    """
    ncycle:8,16 | fpf-involution:100,400 | identity:4,8 |
    fixed-density:<alpha>:16,32 | file:<path> (one cycle type per line)
    """
    kind, _, rest = spec.partition(':')
    if kind == "ncycle":
        family = [CycleType.from_counts({n: 1}) for n in _parse_sizes(rest)]
    elif kind == "fpf-involution":
        sizes = _parse_sizes(rest)
        odd = [n for n in sizes if n % 2]
        if odd:
            raise ValidationError(f"Fixed-point-free involutions need even n, got {odd}")
        family = [CycleType.from_counts({2: n // 2}) for n in sizes]
    elif kind == "identity":
        family = [CycleType.from_counts({1: n}) for n in _parse_sizes(rest)]
    elif kind == "fixed-density":
        density, _, sizes_text = rest.partition(':')
        try:
            alpha = Fraction(density)
        except ValueError:
            raise ValidationError(f"Malformed fixed-point density {density!r}")
        if not 0 <= alpha <= 1:
            raise ValidationError(f"Fixed-point density must lie in [0, 1], got {alpha}")
        family = [fixed_density_class(n, alpha) for n in _parse_sizes(sizes_text)]
    elif kind == "file":
        path = Path(rest)
        try:
            lines = path.read_text().splitlines()
        except FileNotFoundError as e:
            logging.critical("Family file %s does not exist: %s", path, e)
            raise
        family = [CycleType.parse(line) for line in lines
                  if line.strip() and not line.lstrip().startswith('#')]
    else:
        raise ValidationError(
                f"Unknown family {kind!r}, expected ncycle, fpf-involution, identity, fixed-density or file")
    if not family:
        raise ValidationError(f"Family {spec!r} is empty")
    return family
