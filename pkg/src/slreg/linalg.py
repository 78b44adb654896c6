"""Symmetric positive-definite solve shared by the population and sample paths."""

from __future__ import annotations

import math

import numpy as np

PIVOT_TOL = 1e-12
RCOND_MIN = 1e-12


class NotLinearlyIndependentError(ArithmeticError):
    """The regressors are not essentially linearly independent.

    ``pivot`` is the 0-based index of the first regressor whose Cholesky pivot
    fell at or below tolerance, or None when only the condition check failed.
    """

    def __init__(self, message: str, pivot: int | None = None):
        super().__init__(message)
        self.pivot = pivot


def cholesky(gram, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Lower Cholesky factor of ``gram`` with a pivot floor of pivot_tol * max diag."""
    g = np.asarray(gram, dtype=float)
    k = g.shape[0]
    if g.shape != (k, k):
        raise ValueError(f"Gram matrix must be square, got shape {g.shape}")
    if not np.allclose(g, g.T, rtol=1e-12, atol=0.0):
        raise ValueError("Gram matrix is not symmetric")
    scale = max(float(np.max(np.diag(g))) if k else 0.0, 0.0)
    floor = pivot_tol * scale
    L = np.zeros_like(g)
    for j in range(k):
        d = g[j, j] - math.fsum(L[j, :j] ** 2)
        if not d > floor:
            raise NotLinearlyIndependentError(
                f"Gram matrix is not positive definite: pivot {j} is {d:.3e} "
                f"(tolerance {floor:.3e}); regressors are not essentially linearly independent",
                pivot=j,
            )
        L[j, j] = math.sqrt(d)
        for i in range(j + 1, k):
            L[i, j] = (g[i, j] - math.fsum(L[i, :j] * L[j, :j])) / L[j, j]
    return L


def rcond(gram) -> float:
    """Reciprocal 2-norm condition number of a symmetric matrix."""
    w = np.linalg.eigvalsh(np.asarray(gram, dtype=float))
    top = float(np.max(np.abs(w)))
    if top == 0.0:
        return 0.0
    return float(np.min(w)) / top


def spd_solve(gram, rhs, pivot_tol: float = PIVOT_TOL, rcond_min: float = RCOND_MIN) -> np.ndarray:
    """Solve ``gram @ x = rhs`` by forward/back substitution on the Cholesky factor."""
    L = cholesky(gram, pivot_tol)
    rc = rcond(gram)
    if rc < rcond_min:
        raise NotLinearlyIndependentError(
            f"Gram matrix is ill-conditioned (reciprocal condition {rc:.3e} < {rcond_min:.0e})"
        )
    b = np.asarray(rhs, dtype=float)
    k = L.shape[0]
    z = np.zeros(k)
    for i in range(k):
        z[i] = (b[i] - math.fsum(L[i, :i] * z[:i])) / L[i, i]
    x = np.zeros(k)
    for i in reversed(range(k)):
        x[i] = (z[i] - math.fsum(L[i + 1 :, i] * x[i + 1 :])) / L[i, i]
    return x
