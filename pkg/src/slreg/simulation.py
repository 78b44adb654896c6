"""Seeded sampling, ordinary least squares, and empirical consistency checks.

Each source gets its own Philox (counter-based) stream spawned from the user
seed, so draws are reproducible bit for bit and prefix-stable in ``n``. Standard
normals come from numpy's ziggurat sampler; finite laws use the inverse CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import spd_solve
from .model import RandomVectorSpec, classify
from .moments import Poly, Sources, expectation, source_map
from .projection import decompose

DEFAULT_SCHEDULE = (1_000, 10_000, 100_000, 1_000_000)
SPARSE_BIN = 30


def _check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def source_generators(names: Sequence[str], seed: int) -> dict:
    children = np.random.SeedSequence(_check_seed(seed)).spawn(len(names))
    return {name: np.random.Generator(np.random.Philox(ss)) for name, ss in zip(names, children)}


def sample_sources(sources: Sources, n: int, seed: int) -> dict:
    """Draw n i.i.d. values of every source; returns name -> array."""
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    smap = source_map(sources)
    gens = source_generators(list(smap), seed)
    return {name: src.draw(gens[name], n) for name, src in smap.items()}


def evaluate_column(p: Poly, draws: dict, n: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(p.evaluate(draws), dtype=float), (n,)).copy()


@dataclass(frozen=True)
class SampleMatrix:
    n: int
    columns: np.ndarray  # shape (n, 1 + k); Y first
    seed: int

    @property
    def y(self) -> np.ndarray:
        return self.columns[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.columns[:, 1:]


def sample(spec: RandomVectorSpec, n: int, seed: int) -> SampleMatrix:
    draws = sample_sources(spec.sources, n, seed)
    cols = [evaluate_column(p, draws, n) for p in (spec.Y, *spec.X)]
    return SampleMatrix(n=n, columns=np.column_stack(cols), seed=int(seed))


def sample_moments(data: SampleMatrix):
    """Sample Gram (1/n) sum x x^T and cross (1/n) sum x y, fixed summation order."""
    x, y = data.x, data.y
    gram = np.einsum("ni,nj->ij", x, x) / data.n
    cross = np.einsum("ni,n->i", x, y) / data.n
    return gram, cross


def ols(data: SampleMatrix) -> np.ndarray:
    gram, cross = sample_moments(data)
    return spd_solve(gram, cross)


def ols_from_moments(gram, cross) -> np.ndarray:
    return spd_solve(gram, cross)


def predicted_error_scale(spec: RandomVectorSpec) -> np.ndarray:
    """Per-coordinate CLT standard deviation of sqrt(n) (beta_hat - beta).

    Sandwich form G^{-1} E[X X^T eps^2] G^{-1}, evaluated exactly.
    """
    smap = source_map(spec.sources)
    res = decompose(spec.Y, spec.X, smap)
    e2 = res.canonical_error * res.canonical_error
    k = spec.k
    meat = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            meat[i, j] = meat[j, i] = expectation(spec.X[i] * spec.X[j] * e2, smap)
    ginv = np.linalg.inv(res.gram)
    return np.sqrt(np.clip(np.diag(ginv @ meat @ ginv), 0.0, None))


@dataclass
class ConsistencyRow:
    n: int
    beta_hat: np.ndarray
    error: float  # ||beta_hat - beta||_inf
    predicted: float  # max_j CLT standard error at this n


@dataclass
class ConsistencyReport:
    beta: np.ndarray
    seed: int
    rows: list

    @property
    def errors(self) -> list:
        return [r.error for r in self.rows]

    @property
    def decreasing_steps(self) -> int:
        e = self.errors
        return sum(b < a for a, b in zip(e, e[1:]))

    @property
    def mostly_decreasing(self) -> bool:
        steps = len(self.rows) - 1
        return steps <= 0 or self.decreasing_steps >= math.ceil(2 * steps / 3)

    @property
    def final_error(self) -> float:
        return self.rows[-1].error


def consistency_experiment(spec: RandomVectorSpec, schedule=DEFAULT_SCHEDULE, seed: int = 0) -> ConsistencyReport:
    """OLS error against the population coefficient along a schedule of sample sizes.

    Samples are nested: the same seed is used for each n, and draws are
    prefix-stable, so larger samples extend smaller ones.
    """
    beta = classify(spec)
    scale = predicted_error_scale(spec)
    rows = []
    for n in schedule:
        n = int(n)
        bh = ols(sample(spec, n, seed))
        rows.append(ConsistencyRow(n=n, beta_hat=bh, error=float(np.max(np.abs(bh - beta))),
                                   predicted=float(np.max(scale)) / math.sqrt(n)))
    return ConsistencyReport(beta=beta, seed=int(seed), rows=rows)


@dataclass(frozen=True)
class BinMean:
    center: float
    mean: float
    count: int
    sparse: bool


def empirical_conditional_mean(x_samples, e_samples, bins: int = 20) -> list:
    """Per-bin mean of e over equal-width bins spanning the central 99% of x."""
    x = np.asarray(x_samples, dtype=float)
    e = np.asarray(e_samples, dtype=float)
    if x.shape != e.shape or x.ndim != 1:
        raise ValueError("x and e samples must be 1-d arrays of equal length")
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    lo, hi = np.quantile(x, [0.005, 0.995])
    if not hi > lo:
        raise ValueError("degenerate x range: the central 99% of x is a single point")
    edges = np.linspace(lo, hi, bins + 1)
    inside = (x >= lo) & (x <= hi)
    idx = np.clip(np.searchsorted(edges, x[inside], side="right") - 1, 0, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    sums = np.bincount(idx, weights=e[inside], minlength=bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    out = []
    for c, s, m in zip(centers, sums, counts):
        out.append(BinMean(center=float(c), mean=float(s / m) if m else math.nan, count=int(m), sparse=bool(m < SPARSE_BIN)))
    return out


def _usable(bins: Sequence[BinMean]):
    used = [b for b in bins if not b.sparse]
    return np.array([b.center for b in used]), np.array([b.mean for b in used])


def r_squared(bins: Sequence[BinMean], f) -> float:
    """Coefficient of determination of the bin means against a fixed curve f."""
    c, m = _usable(bins)
    ss_res = float(np.sum((m - f(c)) ** 2))
    ss_tot = float(np.sum((m - m.mean()) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else -math.inf)


def polynomial_fit_r2(bins: Sequence[BinMean], degree: int) -> float:
    """Coefficient of determination of a least-squares polynomial fit to the bin means."""
    c, m = _usable(bins)
    coef = np.polyfit(c, m, degree)
    return r_squared(bins, lambda t: np.polyval(coef, t))
