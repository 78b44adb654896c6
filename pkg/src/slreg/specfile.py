"""JSON model specification files.

Layout::

    {
      "sources": [{"name": "x1", "dist": {"type": "gaussian", "variance": 1.0}},
                  {"name": "r", "dist": {"type": "finite",
                                         "points": [{"value": -1, "prob": 0.5},
                                                    {"value": 1, "prob": 0.5}]}}],
      "Y": [{"coeff": 2.0, "monomial": {"x1": 1}}],
      "X": [[{"coeff": 1.0, "monomial": {"x1": 1}}]],
      "beta": [2.0],                       # optional, with "eta"
      "eta": [{"coeff": 1.0, "monomial": {"r": 1}}]
    }

A constant term has an empty monomial. When "Y" is absent it is built from
"beta" and "eta" as sum_j X_j beta_j + eta.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .model import RandomVectorSpec, make_family_member
from .moments import FiniteDiscrete, Gaussian, Poly, SourceDistribution


class SpecFileError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpecFile:
    sources: tuple
    X: tuple
    Y: Poly | None = None
    beta: tuple | None = None
    eta: Poly | None = None

    def to_random_vector(self) -> RandomVectorSpec:
        if self.Y is not None:
            return RandomVectorSpec(self.sources, self.Y, self.X)
        return make_family_member(self.X, self.beta, self.eta, self.sources)


def _require(obj, key, path):
    if not isinstance(obj, dict):
        raise SpecFileError(f"{path}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise SpecFileError(f"{path}: missing field {key!r}")
    return obj[key]


def _number(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecFileError(f"{path}: expected a number, got {v!r}")
    return float(v)


def _parse_source(obj, path) -> SourceDistribution:
    name = _require(obj, "name", path)
    if not isinstance(name, str) or not name:
        raise SpecFileError(f"{path}.name: expected a non-empty string")
    dist = _require(obj, "dist", path)
    kind = _require(dist, "type", f"{path}.dist")
    try:
        if kind == "gaussian":
            return Gaussian(name, _number(_require(dist, "variance", f"{path}.dist"), f"{path}.dist.variance"))
        if kind == "finite":
            pts = _require(dist, "points", f"{path}.dist")
            if not isinstance(pts, list):
                raise SpecFileError(f"{path}.dist.points: expected a list")
            pairs = []
            for i, p in enumerate(pts):
                pp = f"{path}.dist.points[{i}]"
                pairs.append((_number(_require(p, "value", pp), pp + ".value"), _number(_require(p, "prob", pp), pp + ".prob")))
            return FiniteDiscrete(name, tuple(pairs))
    except SpecFileError:
        raise
    except ValueError as exc:
        raise SpecFileError(f"{path}: {exc}") from None
    raise SpecFileError(f"{path}.dist.type: unknown distribution type {kind!r} (expected 'gaussian' or 'finite')")


def _parse_poly(obj, path, names) -> Poly:
    if not isinstance(obj, list):
        raise SpecFileError(f"{path}: expected a list of terms")
    terms = []
    for i, t in enumerate(obj):
        tp = f"{path}[{i}]"
        coeff = _number(_require(t, "coeff", tp), tp + ".coeff")
        mono = t.get("monomial", {}) if isinstance(t, dict) else None
        if not isinstance(mono, dict):
            raise SpecFileError(f"{tp}.monomial: expected an object mapping source name to exponent")
        for n, e in mono.items():
            if n not in names:
                raise SpecFileError(f"{tp}.monomial: undeclared source {n!r}")
            if isinstance(e, bool) or not isinstance(e, int) or e < 0:
                raise SpecFileError(f"{tp}.monomial.{n}: exponent must be a nonnegative integer, got {e!r}")
        terms.append((mono, coeff))
    try:
        return Poly(terms)
    except ValueError as exc:
        raise SpecFileError(f"{path}: {exc}") from None


def parse_spec(doc) -> ModelSpecFile:
    if not isinstance(doc, dict):
        raise SpecFileError("top level: expected an object")
    raw_sources = _require(doc, "sources", "top level")
    if not isinstance(raw_sources, list) or not raw_sources:
        raise SpecFileError("sources: expected a non-empty list")
    sources = tuple(_parse_source(s, f"sources[{i}]") for i, s in enumerate(raw_sources))
    names = [s.name for s in sources]
    if len(set(names)) != len(names):
        raise SpecFileError("sources: duplicate source names")
    raw_x = _require(doc, "X", "top level")
    if not isinstance(raw_x, list) or not raw_x:
        raise SpecFileError("X: expected a non-empty list of polynomials")
    X = tuple(_parse_poly(p, f"X[{j}]", names) for j, p in enumerate(raw_x))
    Y = _parse_poly(doc["Y"], "Y", names) if "Y" in doc else None
    beta = eta = None
    if "beta" in doc:
        b = doc["beta"]
        if not isinstance(b, list) or len(b) != len(X):
            raise SpecFileError(f"beta: expected a list of {len(X)} numbers")
        beta = tuple(_number(v, f"beta[{i}]") for i, v in enumerate(b))
    if "eta" in doc:
        eta = _parse_poly(doc["eta"], "eta", names)
    if Y is None and (beta is None or eta is None):
        raise SpecFileError("top level: either 'Y' or both 'beta' and 'eta' are required")
    return ModelSpecFile(sources=sources, X=X, Y=Y, beta=beta, eta=eta)


def loads(text: str) -> ModelSpecFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_spec(doc)


def load(path) -> ModelSpecFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


def source_to_dict(s: SourceDistribution) -> dict:
    if isinstance(s, Gaussian):
        return {"name": s.name, "dist": {"type": "gaussian", "variance": s.variance}}
    return {"name": s.name, "dist": {"type": "finite", "points": [{"value": v, "prob": p} for v, p in s.points]}}


def poly_to_list(p: Poly) -> list:
    return [{"coeff": c, "monomial": dict(m)} for m, c in sorted(p.terms.items())]


def dump_spec(spec: ModelSpecFile) -> dict:
    doc = {"sources": [source_to_dict(s) for s in spec.sources], "X": [poly_to_list(x) for x in spec.X]}
    if spec.Y is not None:
        doc["Y"] = poly_to_list(spec.Y)
    if spec.beta is not None:
        doc["beta"] = list(spec.beta)
    if spec.eta is not None:
        doc["eta"] = poly_to_list(spec.eta)
    return doc


def dumps(spec: ModelSpecFile) -> str:
    return json.dumps(dump_spec(spec), indent=2)
