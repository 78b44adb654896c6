"""Orthogonal projection of Y onto the span of regressors in L^2."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import spd_solve
from .moments import DEFAULT_TOL, Poly, Sources, covariance, expectation, source_map


@dataclass(frozen=True)
class ProjectionResult:
    beta: np.ndarray
    canonical_error: Poly
    gram: np.ndarray
    cross: np.ndarray
    mse_at_beta: float
    orthogonal_regressors: bool = False


@dataclass
class UncorrelatednessReport:
    has_constant_regressor: bool
    error_mean: float
    orthogonality: list  # E[X_j eps] per regressor
    covariances: list  # K(X_j, eps) per regressor
    orthogonal: bool
    zero_mean: bool
    uncorrelated: bool
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        if self.has_constant_regressor:
            return self.orthogonal and self.zero_mean and self.uncorrelated
        return self.orthogonal


def linear_combination(X: Sequence[Poly], b) -> Poly:
    out = Poly()
    for xj, bj in zip(X, b):
        out = out + xj * float(bj)
    return out


def gram_matrix(X: Sequence[Poly], sources: Sources) -> np.ndarray:
    smap = source_map(sources)
    k = len(X)
    g = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            g[i, j] = g[j, i] = expectation(X[i] * X[j], smap)
    return g


def cross_moments(Y: Poly, X: Sequence[Poly], sources: Sources) -> np.ndarray:
    smap = source_map(sources)
    return np.array([expectation(xj * Y, smap) for xj in X])


def projection_coefficient(Y: Poly, X: Sequence[Poly], sources: Sources) -> np.ndarray:
    """The unique beta solving (E XX^T) beta = E XY.

    Raises NotLinearlyIndependentError when the Gram matrix is not positive
    definite; no regularization is applied.
    """
    smap = source_map(sources)
    return spd_solve(gram_matrix(X, smap), cross_moments(Y, X, smap))


def mse(Y: Poly, X: Sequence[Poly], b, sources: Sources) -> float:
    r = Y - linear_combination(X, b)
    return max(expectation(r * r, sources), 0.0)


def _is_orthogonal_set(gram: np.ndarray, tol: float) -> bool:
    scale = 1.0 + float(np.max(np.abs(gram))) if gram.size else 1.0
    off = gram - np.diag(np.diag(gram))
    return bool(np.all(np.abs(off) <= tol * scale))


def decompose(Y: Poly, X: Sequence[Poly], sources: Sources, tol: float = DEFAULT_TOL) -> ProjectionResult:
    """Split Y into its projection on span(X) plus the canonical error."""
    smap = source_map(sources)
    gram = gram_matrix(X, smap)
    cross = cross_moments(Y, X, smap)
    beta = spd_solve(gram, cross)
    eps = Y - linear_combination(X, beta)
    return ProjectionResult(
        beta=beta,
        canonical_error=eps,
        gram=gram,
        cross=cross,
        mse_at_beta=max(expectation(eps * eps, smap), 0.0),
        orthogonal_regressors=_is_orthogonal_set(gram, tol),
    )


def is_constant_one(p: Poly, tol: float = 0.0) -> bool:
    return p.is_constant(tol) and abs(p.constant_term - 1.0) <= tol


def check_zero_mean_and_uncorrelated(
    result: ProjectionResult, X: Sequence[Poly], sources: Sources, tol: float = DEFAULT_TOL
) -> UncorrelatednessReport:
    """Orthogonality always; zero mean and uncorrelatedness only given a constant regressor."""
    smap = source_map(sources)
    eps = result.canonical_error
    scale = 1.0 + float(np.max(np.abs(result.gram))) if result.gram.size else 1.0
    orth = [expectation(xj * eps, smap) for xj in X]
    covs = [covariance(xj, eps, smap) for xj in X]
    mean = expectation(eps, smap)
    has_const = any(is_constant_one(xj) for xj in X)
    notes = []
    if not has_const:
        notes.append("no constant regressor: orthogonality does not imply uncorrelatedness")
        if abs(mean) > tol * scale:
            notes.append(f"canonical error has nonzero mean {mean:.12g}")
    return UncorrelatednessReport(
        has_constant_regressor=has_const,
        error_mean=mean,
        orthogonality=orth,
        covariances=covs,
        orthogonal=all(abs(v) <= tol * scale for v in orth),
        zero_mean=abs(mean) <= tol * scale,
        uncorrelated=all(abs(c) <= tol * scale for c in covs),
        notes=notes,
    )
