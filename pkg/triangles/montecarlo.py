"""Chunk-parallel Monte Carlo estimation over the triangle models.

Work is cut into chunks of a fixed number of accepted samples (or latent
draws, for acceptance rates). Chunk i draws from its own PCG64 generator
seeded with chunk_seed(seed, i), so the result depends on (seed, chunk_size)
and never on how many threads ran the chunks. Chunk results are reduced in
ascending chunk order.
"""
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from triangles.errors import ChiSquareError, DomainError, SamplingError
from triangles.models import (
    MAX_REJECTION_TRIALS, TriangleBatch, Variable, ModelId, Functional,
    acceptance_probability, angles_from_sides_batch, realize_batch, variable_support,
)
from triangles.quadrature import BOTH, IntegrationSpec, integrate_1d

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 65536
MIN_ESTIMATE_N = 1000
MIN_EXPECTED_COUNT = 5.0

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    std_error: float
    n: int
    seed: int


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    n_total: int

    def __post_init__(self):
        if np.any(np.diff(self.edges) <= 0):
            raise DomainError("histogram edges must be strictly increasing")
        if len(self.counts) != len(self.edges) - 1:
            raise DomainError("histogram needs one count per bin")
        if int(np.sum(self.counts)) != self.n_total:
            raise DomainError("histogram counts do not add up to n_total")


# -- streams -----------------------------------------------------------------

def splitmix64(value):
    """SplitMix64 finalizer applied to value + golden-ratio increment, modulo 2**64."""
    z = (int(value) + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def chunk_seed(seed, index):
    return splitmix64((int(seed) & _MASK64) ^ splitmix64(index))


def chunk_generator(seed, index):
    return np.random.Generator(np.random.PCG64(chunk_seed(seed, index)))


def _threads(threads):
    return max(1, int(threads)) if threads else (os.cpu_count() or 1)


def _run_chunks(task, n_chunks, threads):
    workers = min(_threads(threads), max(1, n_chunks))
    if workers == 1:
        return [task(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, range(n_chunks)))


def _quotas(n, chunk_size):
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be positive, got {chunk_size}")
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _accepted_chunk(model, seed, index, quota):
    rng = chunk_generator(seed, index)
    # latent batch sizing only; the cap bounds the draws per accepted sample
    rate = acceptance_probability(model)
    cap = quota * MAX_REJECTION_TRIALS
    parts, have, drawn = [], 0, 0
    while have < quota:
        if drawn >= cap:
            raise SamplingError(f"{model.label}: chunk {index} accepted {have} of {quota} triangles in {drawn} draws")
        draws = min(int(math.ceil((quota - have) / rate * 1.05)) + 16, cap - drawn)
        batch, _ = realize_batch(model, rng.random(draws), rng.random(draws))
        parts.append(batch)
        have += len(batch)
        drawn += draws
    merged = TriangleBatch.concatenate(parts)
    return TriangleBatch(*(getattr(merged, name)[:quota] for name in ("a", "b", "c", "alpha", "beta", "gamma")))


def sample_triangles(model, n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    """n accepted triangles of a model, reproducible for (seed, chunk_size)."""
    model = ModelId.parse(model)
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    quotas = _quotas(n, chunk_size)
    logger.info(f"Sampling {n} {model.label} triangles in {len(quotas)} chunks")
    batches = _run_chunks(lambda i: _accepted_chunk(model, seed, i, quotas[i]), len(quotas), threads)
    return TriangleBatch.concatenate(batches)


# -- reductions --------------------------------------------------------------

@dataclass(frozen=True)
class _ChunkMoments:
    count: int
    total: float
    mean: float
    m2: float

    @classmethod
    def of(cls, values):
        values = np.asarray(values, float)
        total = math.fsum(values)
        mean = total / len(values)
        return cls(len(values), total, mean, math.fsum((values - mean) ** 2))


def _combine(chunks, seed):
    # compensated sum for the mean, Chan merge for the variance; chunk order fixed
    count, mean, m2 = 0, 0.0, 0.0
    for chunk in chunks:
        merged = count + chunk.count
        delta = chunk.mean - mean
        m2 = m2 + chunk.m2 + delta * delta * count * chunk.count / merged
        mean = mean + delta * chunk.count / merged
        count = merged
    value = math.fsum(chunk.total for chunk in chunks) / count
    std_error = math.sqrt(m2 / (count - 1)) / math.sqrt(count)
    return MomentEstimate(value, std_error, count, seed)


def _binomial(successes, n, seed):
    p = successes / n
    return MomentEstimate(p, math.sqrt(p * (1.0 - p) / n), n, seed)


def _check_n(n, minimum=MIN_ESTIMATE_N):
    if n < minimum:
        raise DomainError(f"n must be at least {minimum}, got {n}")


def estimate_moments(model, functionals, n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    """Estimates of several functionals from one shared run of n accepted samples."""
    model = ModelId.parse(model)
    functionals = [Functional.parse(f) for f in functionals]
    _check_n(n)
    quotas = _quotas(n, chunk_size)

    def task(i):
        batch = _accepted_chunk(model, seed, i, quotas[i])
        return [_ChunkMoments.of(batch.functional(f)) for f in functionals]

    logger.info(f"Estimating {len(functionals)} moments of {model.label} from {n} samples ({len(quotas)} chunks)")
    per_chunk = _run_chunks(task, len(quotas), threads)
    return {f: _combine([chunk[j] for chunk in per_chunk], seed) for j, f in enumerate(functionals)}


def estimate_moment(model, functional, n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    functional = Functional.parse(functional)
    return estimate_moments(model, [functional], n, seed, chunk_size, threads)[functional]


def estimate_obtuse(model, n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    model = ModelId.parse(model)
    _check_n(n)
    quotas = _quotas(n, chunk_size)
    counts = _run_chunks(lambda i: int(np.count_nonzero(_accepted_chunk(model, seed, i, quotas[i]).obtuse())),
                         len(quotas), threads)
    return _binomial(sum(counts), n, seed)


def estimate_acceptance(model, n_trials, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    """Fraction of n_trials latent draws that realize a triangle."""
    model = ModelId.parse(model)
    _check_n(n_trials)
    quotas = _quotas(n_trials, chunk_size)

    def task(i):
        rng = chunk_generator(seed, i)
        _, accepted = realize_batch(model, rng.random(quotas[i]), rng.random(quotas[i]))
        return int(np.count_nonzero(accepted))

    return _binomial(sum(_run_chunks(task, len(quotas), threads)), n_trials, seed)


def _histogram_from_chunks(values_for_chunk, quotas, edges, threads):
    def task(i):
        counts, _ = np.histogram(values_for_chunk(i), bins=edges)
        return counts
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    for chunk_counts in _run_chunks(task, len(quotas), threads):
        counts += chunk_counts
    return Histogram(edges, counts, int(counts.sum()))


def histogram_variable(model, variable, bins, n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    """Equal-width histogram of a side or angle over the model's analytic support."""
    model = ModelId.parse(model)
    variable = Variable.parse(variable)
    if bins < 10:
        raise DomainError(f"histograms need at least 10 bins, got {bins}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    lo, hi = variable_support(model, variable)
    edges = np.linspace(lo, hi, bins + 1)
    quotas = _quotas(n, chunk_size)
    return _histogram_from_chunks(
        lambda i: _accepted_chunk(model, seed, i, quotas[i]).column(variable), quotas, edges, threads
    )


# -- goodness of fit -----------------------------------------------------------

def _merge_groups(observed, expected):
    """Merge adjacent bins left to right until each group expects at least MIN_EXPECTED_COUNT."""
    groups_o, groups_e = [], []
    acc_o, acc_e = 0.0, 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= MIN_EXPECTED_COUNT:
            groups_o.append(acc_o)
            groups_e.append(acc_e)
            acc_o, acc_e = 0.0, 0.0
    if acc_e > 0.0 or acc_o > 0.0:
        if not groups_e:
            raise ChiSquareError("total expected count is below the minimum for a single bin")
        groups_o[-1] += acc_o
        groups_e[-1] += acc_e
    if len(groups_e) < 2:
        raise ChiSquareError("bin merging left fewer than two groups")
    merged = len(observed) - len(groups_e)
    if merged:
        logger.warning(f"Merged {merged} low-expectation bins into neighbours ({len(groups_e)} groups remain)")
    return np.array(groups_o), np.array(groups_e)


def chi_square_fit(hist, density, points=(), spec=None):
    """Pearson goodness-of-fit of a histogram against a density; returns (statistic, p_value)."""
    if hist.n_total == 0:
        raise ChiSquareError("cannot test an empty histogram")
    spec = spec or IntegrationSpec(absolute_tolerance=1e-12, relative_tolerance=1e-10)
    expected = []
    for lo, hi in zip(hist.edges[:-1], hist.edges[1:]):
        inside = [p for p in points if lo < p < hi]
        mass = integrate_1d(density, lo, hi, spec.with_singular(*BOTH, points=inside)).value
        expected.append(hist.n_total * mass)
    observed, expected = _merge_groups(hist.counts.astype(float), expected)
    statistic = float(np.sum((observed - expected) ** 2 / expected))
    p_value = float(stats.chi2.sf(statistic, len(expected) - 1))
    logger.info(f"chi-square {statistic:.3f} on {len(expected) - 1} dof, p = {p_value:.4g}")
    return statistic, p_value


def chi_square_two_sample(first, second):
    if not np.array_equal(first.edges, second.edges):
        raise ChiSquareError("histograms must share bin edges")
    if first.n_total == 0 or second.n_total == 0:
        raise ChiSquareError("cannot test an empty histogram")
    table = np.vstack([first.counts, second.counts])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        raise ChiSquareError("fewer than two occupied bins")
    statistic, p_value, dof, _ = stats.chi2_contingency(table, correction=False)
    logger.info(f"two-sample chi-square {statistic:.3f} on {dof} dof, p = {p_value:.4g}")
    return float(statistic), float(p_value)


# -- Gaussian triangles in three dimensions --------------------------------------

def _polar_normals(rng, count):
    # Marsaglia polar method
    out = []
    have = 0
    while have < count:
        pairs = (count - have) // 2 + 1
        draws = int(pairs / (math.pi / 4) * 1.05) + 8
        u = 2.0 * rng.random(draws) - 1.0
        v = 2.0 * rng.random(draws) - 1.0
        s = u * u + v * v
        keep = (s > 0.0) & (s < 1.0)
        u, v, s = u[keep], v[keep], s[keep]
        factor = np.sqrt(-2.0 * np.log(s) / s)
        normals = np.column_stack([u * factor, v * factor]).ravel()
        out.append(normals)
        have += len(normals)
    return np.concatenate(out)[:count]


def _gaussian_chunk(seed, index, quota):
    rng = chunk_generator(seed, index)
    alphas, betas, gammas = [], [], []
    have = 0
    while have < quota:
        need = quota - have
        points = _polar_normals(rng, 9 * need).reshape(need, 3, 3)
        p0, p1, p2 = points[:, 0], points[:, 1], points[:, 2]
        a = np.linalg.norm(p1 - p2, axis=1)
        b = np.linalg.norm(p0 - p2, axis=1)
        c = np.linalg.norm(p0 - p1, axis=1)
        alpha, beta, gamma, valid = angles_from_sides_batch(a, b, c)
        alphas.append(alpha[valid])
        betas.append(beta[valid])
        gammas.append(gamma[valid])
        have += int(np.count_nonzero(valid))
    return (np.concatenate(alphas)[:quota], np.concatenate(betas)[:quota], np.concatenate(gammas)[:quota])


def gaussian_triangle_batch(n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    quotas = _quotas(n, chunk_size)
    chunks = _run_chunks(lambda i: _gaussian_chunk(seed, i, quotas[i]), len(quotas), threads)
    return tuple(np.concatenate([chunk[j] for chunk in chunks]) for j in range(3))


def gaussian_triangle_angles_3d(n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    alpha, beta, _ = gaussian_triangle_batch(n, seed, chunk_size, threads)
    for pair in zip(alpha, beta):
        yield float(pair[0]), float(pair[1])


def gaussian_angle_histogram(bins, n, seed=0, chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    edges = np.linspace(0.0, math.pi, bins + 1)
    quotas = _quotas(n, chunk_size)
    return _histogram_from_chunks(lambda i: _gaussian_chunk(seed, i, quotas[i])[0], quotas, edges, threads)
