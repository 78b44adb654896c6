"""Sequential Gram-Schmidt in the E[..] inner product."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import PIVOT_TOL, NotLinearlyIndependentError
from .moments import Poly, Sources, expectation, source_map
from .projection import gram_matrix, linear_combination


@dataclass(frozen=True)
class OrthogonalizationResult:
    A: np.ndarray
    orthogonalized: tuple

    def is_unit_lower_triangular(self) -> bool:
        A = self.A
        return bool(np.all(np.diag(A) == 1.0) and np.all(np.triu(A, 1) == 0.0))


def orthogonalize(X: Sequence[Poly], sources: Sources, pivot_tol: float = PIVOT_TOL) -> OrthogonalizationResult:
    """Return the unit lower-triangular A with E[(AX)(AX)^T] diagonal.

    Row i is X_i minus its components along the earlier orthogonalized
    regressors, re-expanded in the original basis; ``det A = 1`` by shape.
    """
    smap = source_map(sources)
    G = gram_matrix(X, smap)
    k = len(X)
    A = np.eye(k)
    norms = np.zeros(k)
    floor = pivot_tol * (float(np.max(np.diag(G))) if k else 0.0)
    for i in range(k):
        for j in range(i):
            # E[Xbar_j X_i] / E[Xbar_j^2]; the partial residual replaces X_i
            # (equal in exact arithmetic, better conditioned in floating point)
            a = (A[j] @ G @ A[i]) / norms[j]
            A[i, : j + 1] -= a * A[j, : j + 1]
        A[i, i] = 1.0
        A[i, i + 1 :] = 0.0
        norms[i] = A[i] @ G @ A[i]
        if not norms[i] > floor:
            raise NotLinearlyIndependentError(
                f"regressor {i} lies in the span of the earlier ones (residual second moment "
                f"{norms[i]:.3e}); regressors are not essentially linearly independent",
                pivot=i,
            )
    comps = tuple(linear_combination(X, A[i]) for i in range(k))
    return OrthogonalizationResult(A=A, orthogonalized=comps)


def projection_via_orthogonalization(
    Y: Poly, X: Sequence[Poly], sources: Sources, result: OrthogonalizationResult | None = None
):
    """beta = A^T alpha, with alpha the (diagonal-Gram) projection on AX.

    Returns ``(beta, alpha, result)``.
    """
    smap = source_map(sources)
    if result is None:
        result = orthogonalize(X, smap)
    alpha = np.array([expectation(z * Y, smap) / expectation(z * z, smap) for z in result.orthogonalized])
    return result.A.T @ alpha, alpha, result
