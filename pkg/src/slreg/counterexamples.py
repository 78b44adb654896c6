"""Catalogue of distinguishing examples, each with machine-checkable claims.

Covered: orthogonality without mean independence, projection disagreeing with
conditional expectation, and orthogonality vs uncorrelatedness in both
directions.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .moments import (
    DEFAULT_TOL,
    Gaussian,
    Poly,
    SourceDistribution,
    conditional_expectation,
    covariance,
    expectation,
    rademacher,
    source_map,
    variance,
)
from .simulation import sample_sources

MC_SE_MULTIPLIER = 5.0

MOMENT = "moment"  # E[operands[0]]
COVARIANCE = "covariance"  # K(operands[0], operands[1])
RATIO = "ratio"  # E[operands[0]] / E[operands[1]]
CONDITIONAL = "conditional"  # E(operands[0] || conditioning) == expected polynomial
MEAN_INDEPENDENT = "mean_independent"  # expected is a bool
NUMERIC_KINDS = (MOMENT, COVARIANCE, RATIO)


class CounterexampleRejected(ValueError):
    """The inputs satisfy the hypotheses but the witness degenerates."""


@dataclass(frozen=True)
class Claim:
    label: str
    kind: str
    operands: tuple
    expected: object
    conditioning: frozenset = frozenset()


@dataclass(frozen=True)
class CounterexampleCase:
    name: str
    sources: tuple
    variables: dict
    claims: tuple
    parameters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MonteCarlo:
    n: int
    seed: int


@dataclass
class ClaimResult:
    label: str
    kind: str
    expected: object
    computed: object
    passed: bool
    mode: str
    standard_error: float | None = None


@dataclass
class VerificationReport:
    case: str
    mode: str
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def table(self) -> str:
        lines = [f"case {self.case} [{self.mode}]"]
        for r in self.results:
            exp = _fmt(r.expected)
            got = _fmt(r.computed)
            se = f"  (SE {r.standard_error:.3g})" if r.standard_error is not None else ""
            lines.append(f"  {'PASS' if r.passed else 'FAIL'}  {r.label}: expected {exp}, computed {got}{se}")
        lines.append("all claims pass" if self.passed else "some claims FAILED")
        return "\n".join(lines)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, (float, int, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


# builders ------------------------------------------------------------------


def build_theorem1(source: SourceDistribution, tol: float = DEFAULT_TOL, name: str = "theorem1") -> CounterexampleCase:
    """X a symmetric-enough source with E X^3 = 0; eps = X^2 is orthogonal to X but a function of it."""
    srcs = (source,)
    X = Poly.var(source.name)
    eps = X * X
    third = expectation(X**3, srcs)
    if abs(third) > tol:
        raise ValueError(f"E X^3 = {third:.12g} is not zero")
    if not expectation(eps, srcs) > tol:
        raise ValueError("X is concentrated on {0}")
    if not variance(eps, srcs) > tol:
        raise CounterexampleRejected(
            f"eps = X^2 is degenerate for source {source.name!r} (Var X^2 = 0), so it is trivially mean independent"
        )
    return CounterexampleCase(
        name=name,
        sources=srcs,
        variables={"X": X, "eps": eps},
        claims=(
            Claim("E[X eps]", MOMENT, (X * eps,), 0.0),
            Claim("E[eps] (finite)", MOMENT, (eps,), expectation(X * X, srcs)),
            Claim("E(eps || X)", CONDITIONAL, (eps,), eps, frozenset({source.name})),
            Claim("eps mean independent of X", MEAN_INDEPENDENT, (eps,), False, frozenset({source.name})),
        ),
    )


def build_theorem1_gaussian(sigma: float = 1.0) -> CounterexampleCase:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    case = build_theorem1(Gaussian("x", sigma * sigma), name="theorem1-gaussian")
    return dataclasses.replace(case, parameters={"sigma": sigma})


def build_example1_product() -> CounterexampleCase:
    srcs = (rademacher("pi1"), Gaussian("pi2", 1.0))
    pi1, pi2 = Poly.var("pi1"), Poly.var("pi2")
    X = pi2
    eps = pi1 + pi2 * pi2
    reg = pi2 * pi2
    centred = reg - 1.0
    return CounterexampleCase(
        name="example1-product",
        sources=srcs,
        variables={"X": X, "eps": eps},
        claims=(
            Claim("E[X eps]", MOMENT, (X * eps,), 0.0),
            Claim("E[eps]", MOMENT, (eps,), 1.0),
            Claim("E(eps || pi2)", CONDITIONAL, (eps,), reg, frozenset({"pi2"})),
            Claim("eps mean independent of X", MEAN_INDEPENDENT, (eps,), False, frozenset({"pi2"})),
            # chi^2(1) checked through mean, variance and third central moment
            Claim("mean of E(eps || X)", MOMENT, (reg,), 1.0),
            Claim("variance of E(eps || X)", MOMENT, (centred**2,), 2.0),
            Claim("third central moment of E(eps || X)", MOMENT, (centred**3,), 8.0),
        ),
    )


def build_corollary1(sigma: float = 1.0) -> CounterexampleCase:
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    srcs = (Gaussian("x", sigma * sigma),)
    X = Poly.var("x")
    Y = X + X * X
    witness = Y - X  # conditional expectation minus projection
    return CounterexampleCase(
        name="corollary1",
        sources=srcs,
        variables={"X": X, "Y": Y, "witness": witness},
        claims=(
            Claim("projection coefficient E[XY]/E[X^2]", RATIO, (X * Y, X * X), 1.0),
            Claim("E[X (Y - X)]", MOMENT, (X * witness,), 0.0),
            Claim("E(Y || X)", CONDITIONAL, (Y,), Y, frozenset({"x"})),
            Claim("E[witness^2]", MOMENT, (witness * witness,), 3.0 * sigma**4),
        ),
        parameters={"sigma": sigma},
    )


def build_theorem3_first(t: float = 1.0) -> CounterexampleCase:
    """Orthogonal but correlated: X = xi + sqrt t, eps = xi - sqrt t, xi ~ N(0, t)."""
    if not t > 0:
        raise ValueError("t must be positive")
    srcs = (Gaussian("xi", t),)
    xi = Poly.var("xi")
    X = xi + math.sqrt(t)
    eps = xi - math.sqrt(t)
    return CounterexampleCase(
        name="theorem3-orth-not-uncorr",
        sources=srcs,
        variables={"X": X, "eps": eps},
        claims=(
            Claim("E[X eps]", MOMENT, (X * eps,), 0.0),
            Claim("K(X, eps)", COVARIANCE, (X, eps), t),
        ),
        parameters={"t": t},
    )


def build_theorem3_second(t: float = 1.0) -> CounterexampleCase:
    """Uncorrelated but not orthogonal: X = t xi^2, eps = 1/(t xi) + t with xi Rademacher.

    On {-1, 1} the reciprocal of xi is xi itself, so eps is stored as xi/t + t.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    srcs = (rademacher("xi"),)
    xi = Poly.var("xi")
    X = t * xi * xi
    eps = xi / t + t
    return CounterexampleCase(
        name="theorem3-uncorr-not-orth",
        sources=srcs,
        variables={"X": X, "eps": eps},
        claims=(
            Claim("E[X eps]", MOMENT, (X * eps,), t * t),
            Claim("K(X, eps)", COVARIANCE, (X, eps), 0.0),
            Claim("E[X]", MOMENT, (X,), t),
            Claim("E[eps]", MOMENT, (eps,), t),
        ),
        parameters={"t": t},
    )


CASES = {
    "theorem1-gaussian": (build_theorem1_gaussian, "sigma"),
    "example1-product": (build_example1_product, None),
    "corollary1": (build_corollary1, "sigma"),
    "theorem3-orth-not-uncorr": (build_theorem3_first, "t"),
    "theorem3-uncorr-not-orth": (build_theorem3_second, "t"),
}


def build_case(name: str, t: float | None = None, sigma: float | None = None) -> CounterexampleCase:
    if name not in CASES:
        raise KeyError(f"unknown case {name!r}; valid names: {', '.join(CASES)}")
    builder, param = CASES[name]
    value = {"t": t, "sigma": sigma}.get(param) if param else None
    return builder(value) if value is not None else builder()


def corrupt(case: CounterexampleCase, index: int, offset: float) -> CounterexampleCase:
    """Copy of ``case`` with claim ``index`` shifted by ``offset`` (negated if boolean)."""
    claims = list(case.claims)
    c = claims[index]
    if isinstance(c.expected, bool):
        new = not c.expected
    elif isinstance(c.expected, Poly):
        new = c.expected + offset
    else:
        new = float(c.expected) + offset
    claims[index] = dataclasses.replace(c, expected=new)
    return dataclasses.replace(case, claims=tuple(claims))


# verification --------------------------------------------------------------


def _exact_value(c: Claim, smap):
    if c.kind == MOMENT:
        return expectation(c.operands[0], smap)
    if c.kind == COVARIANCE:
        return covariance(c.operands[0], c.operands[1], smap)
    if c.kind == RATIO:
        return expectation(c.operands[0], smap) / expectation(c.operands[1], smap)
    if c.kind == CONDITIONAL:
        return conditional_expectation(c.operands[0], c.conditioning, smap).regression_polynomial
    if c.kind == MEAN_INDEPENDENT:
        return conditional_expectation(c.operands[0], c.conditioning, smap).is_constant()
    raise ValueError(f"unknown claim kind {c.kind!r}")


def _structural_result(c: Claim, smap, tol: float) -> ClaimResult:
    got = _exact_value(c, smap)
    if c.kind == CONDITIONAL:
        ok = (got - c.expected).pruned(tol).is_zero()
    else:
        ok = got == c.expected
    return ClaimResult(c.label, c.kind, c.expected, got, bool(ok), "exact")


def _mc_estimate(c: Claim, draws, n: int):
    vals = [np.broadcast_to(np.asarray(p.evaluate(draws), dtype=float), (n,)) for p in c.operands]
    if c.kind == MOMENT:
        a = vals[0]
        return float(a.mean()), float(a.std(ddof=1)) / math.sqrt(n)
    if c.kind == COVARIANCE:
        a, b = vals
        prod = (a - a.mean()) * (b - b.mean())
        return float(prod.sum() / (n - 1)), float(prod.std(ddof=1)) / math.sqrt(n)
    a, b = vals
    r = a.mean() / b.mean()
    influence = (a - r * b) / b.mean()
    return float(r), float(influence.std(ddof=1)) / math.sqrt(n)


def verify(case: CounterexampleCase, mode="exact", tol: float = DEFAULT_TOL) -> VerificationReport:
    """Evaluate every claim exactly or, for numeric claims, by simulation.

    Exact numeric claims pass within absolute ``tol``. Monte Carlo claims pass
    within 5 estimated standard errors; structural claims (conditional
    expectations) are always decided exactly.
    """
    smap = source_map(case.sources)
    results = []
    if mode == "exact":
        for c in case.claims:
            if c.kind in NUMERIC_KINDS:
                got = _exact_value(c, smap)
                results.append(ClaimResult(c.label, c.kind, c.expected, got, abs(got - c.expected) <= tol, "exact"))
            else:
                results.append(_structural_result(c, smap, tol))
        return VerificationReport(case.name, "exact", results)
    if not isinstance(mode, MonteCarlo):
        raise ValueError(f"mode must be 'exact' or MonteCarlo(n, seed), got {mode!r}")
    if mode.n < 2:
        raise ValueError("Monte Carlo verification needs n >= 2")
    draws = sample_sources(case.sources, mode.n, mode.seed)
    for c in case.claims:
        if c.kind in NUMERIC_KINDS:
            est, se = _mc_estimate(c, draws, mode.n)
            ok = abs(est - c.expected) <= max(MC_SE_MULTIPLIER * se, tol)
            results.append(ClaimResult(c.label, c.kind, c.expected, est, bool(ok), "monte_carlo", se))
        else:
            results.append(_structural_result(c, smap, tol))
    return VerificationReport(case.name, f"monte_carlo n={mode.n} seed={mode.seed}", results)
