"""Fundamental random vectors, model membership, and the beta-indexed families.

A distribution on R^{1+k} is represented by the random vector (Y, X_1..X_k)
that induces it; membership is decided from the moments of its components.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import NotLinearlyIndependentError, cholesky
from .moments import DEFAULT_TOL, Poly, SourceDistribution, UndeclaredSourceError, expectation, source_map
from .projection import decompose, linear_combination, projection_coefficient


class NotAMemberError(ValueError):
    pass


class FamilyPreconditionError(ValueError):
    def __init__(self, message: str, violations: list):
        super().__init__(message)
        self.violations = violations


@dataclass(frozen=True)
class RandomVectorSpec:
    sources: tuple
    Y: Poly
    X: tuple

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "X", tuple(self.X))
        if not self.X:
            raise ValueError("at least one regressor is required")
        declared = source_map(self.sources).keys()
        for label, p in [("Y", self.Y)] + [(f"X{j + 1}", x) for j, x in enumerate(self.X)]:
            missing = p.symbols - declared
            if missing:
                raise UndeclaredSourceError(f"{label} uses undeclared sources {sorted(missing)}")

    @property
    def k(self) -> int:
        return len(self.X)

    @property
    def source_names(self) -> tuple:
        return tuple(s.name for s in self.sources)

    def rename_sources(self, mapping: dict) -> "RandomVectorSpec":
        return RandomVectorSpec(
            sources=tuple(s.renamed(mapping.get(s.name, s.name)) for s in self.sources),
            Y=self.Y.rename(mapping),
            X=tuple(x.rename(mapping) for x in self.X),
        )


@dataclass
class ModelDiagnosis:
    k: int
    second_moments: dict  # component label -> E Z^2
    cross_moments: dict  # (j, j') with j < j' (0-based) -> E X_j X_j'
    nondegenerate: list
    orthogonal_set: dict  # (j, j') -> bool
    gram_pd: bool
    l2_finite: bool = True
    notes: list = field(default_factory=list)

    @property
    def is_fundamental(self) -> bool:
        return self.l2_finite and all(self.nondegenerate) and all(self.orthogonal_set.values())

    @property
    def is_member(self) -> bool:
        return self.is_fundamental

    def violations(self) -> list:
        out = [f"X{j + 1} is concentrated on {{0}} (E X{j + 1}^2 = {self.second_moments[f'X{j + 1}']:.12g})"
               for j, ok in enumerate(self.nondegenerate) if not ok]
        out += [f"X{a + 1} and X{b + 1} are not orthogonal (E X{a + 1} X{b + 1} = {self.cross_moments[(a, b)]:.12g})"
                for (a, b), ok in self.orthogonal_set.items() if not ok]
        return out


def _pair_scale(m2: Sequence[float], a: int, b: int) -> float:
    return max(1.0, math.sqrt(max(m2[a], 0.0) * max(m2[b], 0.0)))


def validate_fundamental(spec: RandomVectorSpec, tol: float = DEFAULT_TOL) -> ModelDiagnosis:
    """Check square integrability, nondegeneracy at 0, and pairwise orthogonality.

    A regressor is concentrated on {0} iff its second moment vanishes; a pair is
    accepted as orthogonal only when the cross moment is within tolerance, so
    near-violations are rejected.
    """
    smap = source_map(spec.sources)
    m2 = [expectation(x * x, smap) for x in spec.X]
    second = {"Y": expectation(spec.Y * spec.Y, smap)}
    second.update({f"X{j + 1}": v for j, v in enumerate(m2)})
    cross, orth = {}, {}
    for a, b in itertools.combinations(range(spec.k), 2):
        c = expectation(spec.X[a] * spec.X[b], smap)
        cross[(a, b)] = c
        orth[(a, b)] = abs(c) <= tol * _pair_scale(m2, a, b)
    gram = np.diag(m2)
    for (a, b), c in cross.items():
        gram[a, b] = gram[b, a] = c
    try:
        cholesky(gram)
        pd = True
    except NotLinearlyIndependentError:
        pd = False
    return ModelDiagnosis(
        k=spec.k,
        second_moments=second,
        cross_moments=cross,
        nondegenerate=[v > tol for v in m2],
        orthogonal_set=orth,
        gram_pd=pd,
    )


def is_stochastic_linear_regression(spec: RandomVectorSpec, tol: float = DEFAULT_TOL) -> bool:
    return validate_fundamental(spec, tol).is_member


def make_family_member(
    X: Sequence[Poly],
    beta,
    eta: Poly,
    sources: Sequence[SourceDistribution],
    tol: float = DEFAULT_TOL,
) -> RandomVectorSpec:
    """Build Y = sum_j X_j beta_j + eta after checking {eta, X_1..X_k} is orthogonal."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (len(X),):
        raise ValueError(f"beta has shape {beta.shape}, expected ({len(X)},)")
    smap = source_map(sources)
    comps = [("eta", eta)] + [(f"X{j + 1}", x) for j, x in enumerate(X)]
    m2 = {label: expectation(p * p, smap) for label, p in comps}
    violations = [f"{label} is concentrated on {{0}}" for label, _ in comps[1:] if not m2[label] > tol]
    for (la, pa), (lb, pb) in itertools.combinations(comps, 2):
        c = expectation(pa * pb, smap)
        if abs(c) > tol * max(1.0, math.sqrt(m2[la] * m2[lb])):
            violations.append(f"E {la} {lb} = {c:.12g} != 0")
    if violations:
        raise FamilyPreconditionError("family construction preconditions violated: " + "; ".join(violations), violations)
    Y = linear_combination(X, beta) + eta
    return RandomVectorSpec(sources=tuple(sources), Y=Y, X=tuple(X))


def classify(spec: RandomVectorSpec, tol: float = DEFAULT_TOL) -> np.ndarray:
    """The unique beta with spec in S_beta, i.e. its projection coefficient."""
    diag = validate_fundamental(spec, tol)
    if not diag.is_member:
        raise NotAMemberError("not a stochastic linear regression: " + "; ".join(diag.violations()))
    return projection_coefficient(spec.Y, spec.X, spec.sources)


def canonical_error(spec: RandomVectorSpec) -> Poly:
    return decompose(spec.Y, spec.X, spec.sources).canonical_error


@dataclass
class InjectivityReport:
    betas: np.ndarray
    recovered: np.ndarray
    max_recovery_error: float
    min_input_gap: float
    min_recovered_gap: float

    @property
    def injective(self) -> bool:
        return len(self.betas) < 2 or self.min_recovered_gap > 0.0


def check_injectivity(
    X: Sequence[Poly], eta: Poly, betas, sources: Sequence[SourceDistribution], tol: float = DEFAULT_TOL
) -> InjectivityReport:
    betas = np.atleast_2d(np.asarray(betas, dtype=float))
    for a, b in itertools.combinations(range(len(betas)), 2):
        if np.array_equal(betas[a], betas[b]):
            raise ValueError(f"betas {a} and {b} coincide")
    recovered = np.array([classify(make_family_member(X, b, eta, sources, tol), tol) for b in betas])
    err = float(np.max(np.abs(recovered - betas))) if len(betas) else 0.0
    gaps_in = [np.max(np.abs(betas[a] - betas[b])) for a, b in itertools.combinations(range(len(betas)), 2)]
    gaps_out = [np.max(np.abs(recovered[a] - recovered[b])) for a, b in itertools.combinations(range(len(betas)), 2)]
    return InjectivityReport(
        betas=betas,
        recovered=recovered,
        max_recovery_error=err,
        min_input_gap=float(min(gaps_in, default=math.inf)),
        min_recovered_gap=float(min(gaps_out, default=math.inf)),
    )
