"""Exact moment algebra for polynomials in independent scalar sources.

Every random variable is a real polynomial over named sources. Because the
sources are mutually independent, the expectation of a monomial factors into a
product of per-source raw moments, so any moment of any polynomial expression
is available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

DEGREE_CAP = 64
DEFAULT_TOL = 1e-10

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by source name


class MomentError(ValueError):
    """Base class for moment-engine failures."""


class DegreeOverflowError(MomentError):
    pass


class UndeclaredSourceError(MomentError):
    pass


class SourceDistribution:
    """An independent scalar source with closed-form raw moments."""

    name: str

    def raw_moment(self, n: int, cap: int = DEGREE_CAP) -> float:
        _check_order(n, cap)
        return self._moment(n)

    def _moment(self, n: int) -> float:
        raise NotImplementedError

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def renamed(self, name: str) -> "SourceDistribution":
        raise NotImplementedError


def _check_order(n: int, cap: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise MomentError(f"moment order must be a nonnegative integer, got {n!r}")
    if n > cap:
        raise DegreeOverflowError(f"moment order {n} exceeds degree cap {cap}")


@dataclass(frozen=True)
class Gaussian(SourceDistribution):
    """Mean-zero normal source N(0, variance)."""

    name: str
    variance: float

    def __post_init__(self):
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValueError(f"Gaussian variance must be positive, got {self.variance!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def _moment(self, n: int) -> float:
        if n % 2:
            return 0.0
        # (n-1)!! * sigma^n, written with variance^(n/2) to avoid a sqrt round-trip
        dfact = 1
        for m in range(n - 1, 0, -2):
            dfact *= m
        return float(dfact) * self.variance ** (n // 2)

    def draw(self, rng, size):
        # numpy's Generator.standard_normal uses the ziggurat method
        return rng.standard_normal(size) * self.sigma

    def renamed(self, name):
        return Gaussian(name, self.variance)


@dataclass(frozen=True)
class FiniteDiscrete(SourceDistribution):
    """Source taking finitely many values; a single point gives a Dirac law."""

    name: str
    points: tuple  # tuple[tuple[float, float], ...] of (value, prob)

    def __post_init__(self):
        pts = tuple((float(v), float(p)) for v, p in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError(f"source {self.name!r}: at least one support point is required")
        values = [v for v, _ in pts]
        if len(set(values)) != len(values):
            raise ValueError(f"source {self.name!r}: support values must be distinct")
        for v, p in pts:
            if not (0.0 < p <= 1.0):
                raise ValueError(f"source {self.name!r}: probability {p!r} at {v!r} is not in (0, 1]")
        total = math.fsum(p for _, p in pts)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"source {self.name!r}: probabilities sum to {total!r}, not 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.points])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.points])

    def _moment(self, n: int) -> float:
        return math.fsum(p * v**n for v, p in self.points)

    def draw(self, rng, size):
        # inverse CDF on the cumulative probabilities
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf, rng.random(size), side="right")
        np.minimum(idx, len(self.points) - 1, out=idx)
        return self.values[idx]

    def renamed(self, name):
        return FiniteDiscrete(name, self.points)


def rademacher(name: str) -> FiniteDiscrete:
    return FiniteDiscrete(name, ((-1.0, 0.5), (1.0, 0.5)))


def dirac(name: str, z: float) -> FiniteDiscrete:
    return FiniteDiscrete(name, ((z, 1.0),))


Sources = Union[Sequence[SourceDistribution], Mapping[str, SourceDistribution]]


def source_map(sources: Sources) -> dict[str, SourceDistribution]:
    if isinstance(sources, Mapping):
        return dict(sources)
    out: dict[str, SourceDistribution] = {}
    for s in sources:
        if s.name in out:
            raise ValueError(f"source {s.name!r} declared twice")
        out[s.name] = s
    return out


def _monomial(powers: Mapping[str, int]) -> Monomial:
    items = []
    for name, e in powers.items():
        if not isinstance(e, (int, np.integer)) or isinstance(e, bool) or e < 0:
            raise ValueError(f"exponent of {name!r} must be a nonnegative integer, got {e!r}")
        if e:
            items.append((str(name), int(e)))
    return tuple(sorted(items))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        d[name] = d.get(name, 0) + e
    return tuple(sorted(d.items()))


class Poly:
    """Immutable real polynomial over named sources.

    ``terms`` maps a monomial (sorted ``(source, exponent)`` pairs, the empty
    tuple being the constant) to its coefficient. Exact zeros are dropped, so the
    zero polynomial has no terms.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable = (), cap: int = DEGREE_CAP):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, float] = {}
        for mono, c in items:
            if isinstance(mono, Mapping):
                mono = _monomial(mono)
            else:
                mono = _monomial(dict(mono))
            deg = _mono_degree(mono)
            if deg > cap:
                raise DegreeOverflowError(f"monomial degree {deg} exceeds degree cap {cap}")
            c = float(c)
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient {c!r}")
            acc[mono] = acc.get(mono, 0.0) + c
        self._terms = {m: c for m, c in acc.items() if c != 0.0}

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._terms = {m: c for m, c in terms.items() if c != 0.0}
        return p

    @classmethod
    def constant(cls, c: float) -> "Poly":
        return cls._raw({(): float(c)})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Poly":
        return cls({((name, power),): 1.0})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._terms), default=0)

    @property
    def symbols(self) -> frozenset:
        return frozenset(name for m in self._terms for name, _ in m)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for m, c in self._terms.items() if m)

    def coefficient(self, powers: Mapping[str, int] | None = None) -> float:
        return self._terms.get(_monomial(powers or {}), 0.0)

    @property
    def constant_term(self) -> float:
        return self._terms.get((), 0.0)

    def pruned(self, tol: float) -> "Poly":
        return Poly._raw({m: c for m, c in self._terms.items() if abs(c) > tol})

    def rename(self, mapping: Mapping[str, str]) -> "Poly":
        out: dict[Monomial, float] = {}
        for m, c in self._terms.items():
            mono = _monomial({mapping.get(n, n): e for n, e in m})
            out[mono] = out.get(mono, 0.0) + c
        return Poly._raw(out)

    def evaluate(self, values: Mapping[str, np.ndarray | float]):
        """Evaluate pointwise; ``values`` maps each source name to samples."""
        total = 0.0
        for m, c in self._terms.items():
            term = c
            for name, e in m:
                if name not in values:
                    raise UndeclaredSourceError(f"no values supplied for source {name!r}")
                term = term * np.asarray(values[name], dtype=float) ** e
            total = total + term
        return total

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return poly_scale(self, -1.0)

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return poly_add(self, poly_scale(other, -1.0))

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return poly_add(other, poly_scale(self, -1.0))

    def __mul__(self, other):
        if isinstance(other, Poly):
            return poly_mul(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return poly_scale(self, float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, (int, float, np.floating, np.integer)):
            return poly_scale(self, 1.0 / float(c))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        out = Poly.constant(1.0)
        for _ in range(n):
            out = poly_mul(out, self)
        return out

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = Poly.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in sorted(self._terms.items(), key=lambda mc: (_mono_degree(mc[0]), mc[0])):
            body = "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)
            if not body:
                parts.append(f"{c:.12g}")
            elif c == 1.0:
                parts.append(body)
            elif c == -1.0:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c:.12g}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, float, np.floating, np.integer)):
        return Poly.constant(float(x))
    return NotImplemented


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p._terms)
    for m, c in q._terms.items():
        out[m] = out.get(m, 0.0) + c
    return Poly._raw(out)


def poly_scale(p: Poly, c: float) -> Poly:
    c = float(c)
    return Poly._raw({m: c * v for m, v in p._terms.items()})


def poly_mul(p: Poly, q: Poly, cap: int = DEGREE_CAP) -> Poly:
    if p.degree + q.degree > cap:
        raise DegreeOverflowError(f"product degree {p.degree + q.degree} exceeds degree cap {cap}")
    out: dict[Monomial, float] = {}
    for ma, ca in p._terms.items():
        for mb, cb in q._terms.items():
            m = _mono_mul(ma, mb)
            out[m] = out.get(m, 0.0) + ca * cb
    return Poly._raw(out)


def raw_moment(source: SourceDistribution, n: int, cap: int = DEGREE_CAP) -> float:
    return source.raw_moment(n, cap)


def _monomial_expectation(m: Monomial, smap: Mapping[str, SourceDistribution], cap: int) -> float:
    value = 1.0
    for name, e in m:
        src = smap.get(name)
        if src is None:
            raise UndeclaredSourceError(f"source {name!r} is not declared")
        value *= src.raw_moment(e, cap)
    return value


def expectation(p: Poly, sources: Sources, cap: int = DEGREE_CAP) -> float:
    """E[p], summing coefficient times the product of per-source raw moments."""
    smap = source_map(sources)
    return math.fsum(c * _monomial_expectation(m, smap, cap) for m, c in p._terms.items())


def covariance(p: Poly, q: Poly, sources: Sources, cap: int = DEGREE_CAP) -> float:
    smap = source_map(sources)
    return expectation(poly_mul(p, q, cap), smap, cap) - expectation(p, smap, cap) * expectation(q, smap, cap)


def variance(p: Poly, sources: Sources, cap: int = DEGREE_CAP) -> float:
    return covariance(p, p, sources, cap)


@dataclass(frozen=True)
class ConditionalExpectationForm:
    """E(p || conditioning sources), as a polynomial in those sources only."""

    conditioning_sources: frozenset
    regression_polynomial: Poly

    def __post_init__(self):
        stray = self.regression_polynomial.symbols - self.conditioning_sources
        if stray:
            raise ValueError(f"regression polynomial uses non-conditioning sources {sorted(stray)}")

    def is_constant(self, tol: float = DEFAULT_TOL) -> bool:
        return self.regression_polynomial.is_constant(tol)


def conditional_expectation(
    p: Poly, conditioning_sources: Iterable[str], sources: Sources, cap: int = DEGREE_CAP
) -> ConditionalExpectationForm:
    """Integrate out every non-conditioning source.

    Valid by independence: each monomial splits into a factor in the
    conditioning sources times a factor in the rest, and the latter is replaced
    by its expectation. Conditioning on a set of sources coincides with
    conditioning on the regressors only when each regressor is a single source.
    """
    smap = source_map(sources)
    cond = frozenset(conditioning_sources)
    unknown = cond - smap.keys()
    if unknown:
        raise UndeclaredSourceError(f"conditioning sources {sorted(unknown)} are not declared")
    out: dict[Monomial, float] = {}
    for m, c in p._terms.items():
        kept = tuple((n, e) for n, e in m if n in cond)
        integrated = tuple((n, e) for n, e in m if n not in cond)
        out[kept] = out.get(kept, 0.0) + c * _monomial_expectation(integrated, smap, cap)
    return ConditionalExpectationForm(cond, Poly._raw(out))


def is_mean_independent(
    p: Poly, conditioning_sources: Iterable[str], sources: Sources, tol: float = DEFAULT_TOL
) -> bool:
    form = conditional_expectation(p, conditioning_sources, sources)
    return form.is_constant(tol)
