"""Shared oracles and random generators for the test suite."""

import itertools
import math

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from slreg.linalg import rcond
from slreg.moments import FiniteDiscrete, Gaussian, Poly, rademacher, source_map
from slreg.projection import gram_matrix

SOURCES = (
    Gaussian("g1", 1.0),
    Gaussian("g2", 2.5),
    rademacher("r"),
    FiniteDiscrete("f", ((-1.0, 0.2), (0.5, 0.5), (2.0, 0.3))),
)


def quadrature_nodes(src, degree):
    """Nodes and weights integrating polynomials up to ``degree`` exactly."""
    if isinstance(src, Gaussian):
        x, w = hermegauss(degree // 2 + 1)
        return x * src.sigma, w / math.sqrt(2 * math.pi)
    return src.values, src.probs


def quadrature_expectation(p, sources):
    """E[p] by tensor-product quadrature over the sources p uses.

    Independent of the monomial-factorization path: p is evaluated pointwise.
    """
    smap = source_map(sources)
    names = sorted(p.symbols)
    if not names:
        return p.constant_term
    grids = [quadrature_nodes(smap[n], p.degree) for n in names]
    total = 0.0
    for combo in itertools.product(*(range(len(x)) for x, _ in grids)):
        point = {n: grids[i][0][j] for i, (n, j) in enumerate(zip(names, combo))}
        weight = math.prod(grids[i][1][j] for i, j in enumerate(combo))
        total += weight * float(p.evaluate(point))
    return total


def random_poly(rng, names, max_terms=4, max_degree=3, coeff=3.0, constant=True):
    terms = []
    for _ in range(rng.integers(1, max_terms + 1)):
        deg = rng.integers(0 if constant else 1, max_degree + 1)
        mono = {}
        for _ in range(deg):
            n = names[rng.integers(len(names))]
            mono[n] = mono.get(n, 0) + 1
        terms.append((mono, rng.uniform(-coeff, coeff)))
    return Poly(terms)


def random_design(rng, k=None, min_rcond=1e-6):
    """A random (sources, X, Y) with a well-conditioned positive-definite Gram.

    Mixes Gaussian and finite sources; k <= 6 regressors over <= 4 sources.
    """
    while True:
        kk = int(rng.integers(1, 7)) if k is None else k
        m = int(rng.integers(1, 5))
        idx = rng.choice(len(SOURCES), size=m, replace=False)
        sources = tuple(SOURCES[i] for i in idx)
        names = [s.name for s in sources]
        X = [random_poly(rng, names, max_degree=2) for _ in range(kk)]
        if any(x.is_zero() for x in X):
            continue
        G = gram_matrix(X, sources)
        if np.all(np.linalg.eigvalsh(G) > 0) and rcond(G) >= min_rcond:
            Y = random_poly(rng, names, max_terms=5, max_degree=3)
            return sources, X, Y


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail=""):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}" + (f" -- {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
