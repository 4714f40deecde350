"""
Uniform sampling from a conjugacy class and streaming estimation of the
moments and m.g.f. of the normalized pair W = (W1, W2).

A uniform random arrangement of 0..n-1 is cut into consecutive blocks whose
lengths are the cycle lengths (largest first); each block is read as one
cycle. Every class member arises from exactly prod_k k^m_k m_k! arrangements,
so the law is exactly uniform on the class.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import chisquare

from permclt.combinatorics import CycleType, centering
from permclt.errors import ValidationError
from permclt.oracle import Permutation, class_members
from permclt.utils import timed

SUPPORTED_BIT_GENERATORS = ("PCG64", "PCG64DXSM", "Philox", "SFC64", "MT19937")
DEFAULT_BIT_GENERATOR = "PCG64"
DEFAULT_BATCH_ELEMENTS = 1_000_000

Grid = Sequence[Tuple[float, float]]


def make_generator(seed_seq: np.random.SeedSequence, name: str = DEFAULT_BIT_GENERATOR) -> np.random.Generator:
    if name not in SUPPORTED_BIT_GENERATORS:
        raise ValidationError(f"Unsupported bit generator {name!r}, expected one of {', '.join(SUPPORTED_BIT_GENERATORS)}")
    return np.random.Generator(getattr(np.random, name)(seed_seq))


def _successors(lam: CycleType) -> np.ndarray:
    """
    nxt[j] is the position following j inside its block, cyclically
    """
    nxt = np.empty(lam.n, dtype=np.int64)
    start = 0
    for k in lam.cycle_lengths():
        nxt[start:start + k - 1] = np.arange(start + 1, start + k)
        nxt[start + k - 1] = start
        start += k
    return nxt


def sample_permutation(lam: CycleType, rng: np.random.Generator) -> Permutation:
    if lam.n < 1:
        raise ValidationError("Sampling needs n >= 1")
    w = rng.permutation(lam.n)
    sigma = np.empty(lam.n, dtype=np.int64)
    sigma[w] = w[_successors(lam)]
    return Permutation(tuple(int(v) + 1 for v in sigma))


def sample_batch(lam: CycleType, count: int, rng: np.random.Generator) -> np.ndarray:
    """
    :return: a (count, n) array whose rows are one-line notations (values 1..n)
        of independent uniform members of the class
    """
    n = lam.n
    if n < 1:
        raise ValidationError("Sampling needs n >= 1")
    w = rng.permuted(np.tile(np.arange(n, dtype=np.int64), (count, 1)), axis=1)
    sigma = np.empty_like(w)
    rows = np.arange(count)[:, None]
    sigma[rows, w] = w[:, _successors(lam)]
    return sigma + 1


def batch_statistics(batch: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """ (descent number, major index) of every row """
    descents = batch[:, :-1] > batch[:, 1:]
    d = 1 + descents.sum(axis=1, dtype=np.int64)
    maj = descents @ np.arange(1, batch.shape[1], dtype=np.int64)
    return d, maj


def combine_moments(count_a: int, mean_a: float, m2_a: float,
                    count_b: int, mean_b: float, m2_b: float) -> Tuple[float, float]:
    """
    Mean and sum of squared deviations of the union of two samples
    (pairwise update of Chan, Golub and LeVeque)
    """
    count = count_a + count_b
    if count_a == 0:
        return mean_b, m2_b
    if count_b == 0:
        return mean_a, m2_a
    delta = mean_b - mean_a
    mean = mean_a + delta * count_b / count
    m2 = m2_a + m2_b + delta * delta * count_a * count_b / count
    return mean, m2


@dataclass
class SampleStats:
    lam: CycleType
    grid: Tuple[Tuple[float, float], ...] = ()
    count: int = 0
    sum_d: int = 0
    sum_maj: int = 0
    sum_d2: int = 0
    sum_maj2: int = 0
    sum_dmaj: int = 0
    # running mean and sum of squared deviations per grid point
    mgf_mean: List[float] = field(default_factory=list)
    mgf_m2: List[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.grid = tuple((float(s), float(r)) for s, r in self.grid)
        if not self.mgf_mean:
            self.mgf_mean = [0.0] * len(self.grid)
            self.mgf_m2 = [0.0] * len(self.grid)

    def add(self, d: np.ndarray, maj: np.ndarray) -> None:
        """ Accumulate a batch of statistics """
        if d.shape[0] == 0:
            return
        previous = self.count
        self.count += int(d.shape[0])
        self.sum_d += int(d.sum())
        self.sum_maj += int(maj.sum())
        self.sum_d2 += int((d * d).sum())
        self.sum_maj2 += int((maj * maj).sum())
        self.sum_dmaj += int((d * maj).sum())
        if not self.grid:
            return
        n = self.lam.n
        center_d, center_maj = centering(n, self.lam.alpha1)
        w1 = (d - float(center_d)) / math.sqrt(n)
        w2 = (maj - float(center_maj)) / n ** 1.5
        for j, (s, r) in enumerate(self.grid):
            values = np.exp(-s * w1 - r * w2)
            batch_mean = float(values.mean())
            batch_m2 = float(np.square(values - batch_mean).sum())
            self.mgf_mean[j], self.mgf_m2[j] = combine_moments(
                    previous, self.mgf_mean[j], self.mgf_m2[j],
                    values.shape[0], batch_mean, batch_m2)

    def merge(self, other: 'SampleStats') -> 'SampleStats':
        if other.lam != self.lam or other.grid != self.grid:
            raise ValidationError("Only accumulators of the same class and grid can be merged")
        combined = [combine_moments(self.count, mean_a, m2_a, other.count, mean_b, m2_b)
                    for mean_a, m2_a, mean_b, m2_b
                    in zip(self.mgf_mean, self.mgf_m2, other.mgf_mean, other.mgf_m2)]
        return SampleStats(
                lam=self.lam, grid=self.grid,
                count=self.count + other.count,
                sum_d=self.sum_d + other.sum_d,
                sum_maj=self.sum_maj + other.sum_maj,
                sum_d2=self.sum_d2 + other.sum_d2,
                sum_maj2=self.sum_maj2 + other.sum_maj2,
                sum_dmaj=self.sum_dmaj + other.sum_dmaj,
                mgf_mean=[mean for mean, _ in combined],
                mgf_m2=[m2 for _, m2 in combined])

    @property
    def mean_d(self) -> Fraction:
        return Fraction(self.sum_d, self.count)

    @property
    def mean_maj(self) -> Fraction:
        return Fraction(self.sum_maj, self.count)

    def mgf_means(self) -> List[float]:
        if self.count == 0:
            raise ValidationError("No sample accumulated")
        return list(self.mgf_mean)

    def mgf_stderrs(self) -> List[float]:
        """ Plain standard error of every m.g.f. estimate """
        if self.count < 2:
            raise ValidationError("Standard errors need at least 2 samples")
        errors = []
        for m2 in self.mgf_m2:
            variance = m2 / (self.count - 1)
            errors.append(math.sqrt(variance / self.count))
        return errors

    @property
    def mgf_grid(self) -> List[Tuple[Tuple[float, float], float]]:
        return list(zip(self.grid, self.mgf_means()))


@dataclass(frozen=True)
class NormalizedMoments:
    mean_W: Tuple[float, float]
    # (Var W1, Cov(W1, W2), Var W2)
    cov_W: Tuple[float, float, float]

    @property
    def correlation(self) -> float:
        w11, w12, w22 = self.cov_W
        if w11 <= 0 or w22 <= 0:
            return 0.0
        return w12 / math.sqrt(w11 * w22)


def normalized_moments(stats: SampleStats) -> NormalizedMoments:
    """
    Mean and unbiased sample covariance of W, from exact integer sums
    """
    if stats.count < 2:
        raise ValidationError(f"Normalized moments need at least 2 samples, got {stats.count}")
    n = stats.lam.n
    count = stats.count
    center_d, center_maj = centering(n, stats.lam.alpha1)
    var_d = Fraction(stats.sum_d2 * count - stats.sum_d ** 2, count * (count - 1))
    var_maj = Fraction(stats.sum_maj2 * count - stats.sum_maj ** 2, count * (count - 1))
    cov = Fraction(stats.sum_dmaj * count - stats.sum_d * stats.sum_maj, count * (count - 1))
    return NormalizedMoments(
            mean_W=(float(stats.mean_d - center_d) / math.sqrt(n),
                    float(stats.mean_maj - center_maj) / n ** 1.5),
            cov_W=(float(var_d / n), float(cov / n ** 2), float(var_maj / n ** 3)))


def batch_size(n: int, batch_elements: int = DEFAULT_BATCH_ELEMENTS) -> int:
    """
    Rows per batch: bounded by <batch_elements> array entries, and small
    enough that int64 batch sums of maj^2 (< n^4 / 4 each) cannot overflow
    """
    return max(1, min(batch_elements // max(n, 1), 2 ** 62 // max(n, 1) ** 4))


@dataclass(frozen=True)
class StreamTask:
    lam: CycleType
    grid: Tuple[Tuple[float, float], ...]
    count: int
    seed_seq: np.random.SeedSequence
    rng_name: str
    batch_elements: int


def run_stream(task: StreamTask) -> SampleStats:
    rng = make_generator(task.seed_seq, task.rng_name)
    stats = SampleStats(task.lam, task.grid)
    size = batch_size(task.lam.n, task.batch_elements)
    left = task.count
    while left > 0:
        rows = min(size, left)
        stats.add(*batch_statistics(sample_batch(task.lam, rows, rng)))
        left -= rows
    return stats


def split_quota(total: int, parts: int) -> List[int]:
    """ Split <total> as evenly as possible, lower indices first """
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def run_sampling(lam: CycleType, n_samples: int, grid: Grid = (), seed: int = 42,
                 workers: int = 1, streams: int = 0, rng_name: str = DEFAULT_BIT_GENERATOR,
                 batch_elements: int = DEFAULT_BATCH_ELEMENTS) -> SampleStats:
    """
    Draw <n_samples> members of <lam> and accumulate their statistics.

    The samples depend on (seed, streams, rng_name, batch_elements) only;
    <streams> defaults to <workers>. Per-stream accumulators are merged in
    stream order, whatever the number of worker processes.
    """
    if n_samples < 1:
        raise ValidationError(f"At least one sample is needed, got {n_samples}")
    if workers < 1:
        raise ValidationError(f"Worker count must be positive, got {workers}")
    if lam.n < 1:
        raise ValidationError("Sampling needs n >= 1")
    for s, r in grid:
        if s <= 0 or r <= 0:
            raise ValidationError(f"Grid points must have s, r > 0, got ({s}, {r})")
    if rng_name not in SUPPORTED_BIT_GENERATORS:
        raise ValidationError(f"Unsupported bit generator {rng_name!r}")
    streams = streams or workers
    grid = tuple((float(s), float(r)) for s, r in grid)
    seed_seqs = np.random.SeedSequence(seed).spawn(streams)
    tasks = [StreamTask(lam, grid, quota, seed_seq, rng_name, batch_elements)
             for quota, seed_seq in zip(split_quota(n_samples, streams), seed_seqs)]
    with timed("Sampling %d members of %s over %d stream(s)", n_samples, lam, streams):
        if workers == 1:
            results: List[SampleStats] = [run_stream(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                results = list(executor.map(run_stream, tasks))
    logging.debug("Per-stream counts: %s", [stats.count for stats in results])
    return reduce(SampleStats.merge, results, SampleStats(lam, grid))


def uniformity_counts(lam: CycleType, n_samples: int, rng: np.random.Generator,
                      batch_elements: int = DEFAULT_BATCH_ELEMENTS) -> Dict[Tuple[int, ...], int]:
    """
    Histogram of sampled one-line notations, as a mapping tuple -> count
    """
    counts: Dict[Tuple[int, ...], int] = {}
    size = batch_size(lam.n, batch_elements)
    left = n_samples
    while left > 0:
        rows = min(size, left)
        batch = sample_batch(lam, rows, rng)
        keys, freq = np.unique(batch, axis=0, return_counts=True)
        for key, c in zip(keys, freq):
            key_t = tuple(int(v) for v in key)
            counts[key_t] = counts.get(key_t, 0) + int(c)
        left -= rows
    return counts


def chi_square_uniformity(lam: CycleType, n_samples: int, seed: int = 42,
                          rng_name: str = DEFAULT_BIT_GENERATOR,
                          members: Optional[Sequence[Permutation]] = None) -> Tuple[float, float]:
    """
    Pearson chi-square test of sampled frequencies against the uniform law
    on the class.

    :return: (statistic, p-value)
    """
    if members is None:
        members = list(class_members(lam))
    rng = make_generator(np.random.SeedSequence(seed), rng_name)
    counts = uniformity_counts(lam, n_samples, rng)
    unknown = set(counts) - {p.one_line for p in members}
    if unknown:
        raise ValidationError(f"Sampler produced {len(unknown)} permutation(s) outside class {lam}")
    observed = [counts.get(p.one_line, 0) for p in members]
    if len(observed) == 1:
        return 0.0, 1.0
    result = chisquare(observed)
    return float(result.statistic), float(result.pvalue)
