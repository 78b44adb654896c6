"""Command-line entry point.

Exit codes: 0 success, 1 mathematical failure (non-member, singular Gram,
failed claim), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import counterexamples as cx
from .linalg import NotLinearlyIndependentError
from .model import FamilyPreconditionError, NotAMemberError, validate_fundamental
from .moments import Poly, conditional_expectation, expectation, source_map
from .orthogonalization import projection_via_orthogonalization
from .projection import check_zero_mean_and_uncorrelated, decompose
from .simulation import (
    DEFAULT_SCHEDULE,
    consistency_experiment,
    empirical_conditional_mean,
    r_squared,
    sample,
)
from .specfile import SpecFileError, load

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PATH_AGREEMENT_TOL = 1e-9


def g(x) -> str:
    return f"{float(x):.12g}"


def vec(v) -> str:
    return "(" + ", ".join(g(x) for x in np.ravel(v)) + ")"


class _Usage(Exception):
    pass


def _emit(args, doc: dict, text: list) -> None:
    if args.format == "json":
        print(json.dumps(doc, indent=2, default=_jsonable))
    else:
        print("\n".join(text))


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    return str(o)


def _load_vector(path):
    return load(path).to_random_vector()


# commands ------------------------------------------------------------------


def cmd_validate(args) -> int:
    spec = _load_vector(args.spec)
    d = validate_fundamental(spec)
    text = [f"k = {d.k}"]
    text += [f"E {label}^2 = {g(v)}" for label, v in d.second_moments.items()]
    text += [f"E X{a + 1} X{b + 1} = {g(c)}" for (a, b), c in d.cross_moments.items()]
    text.append(f"nondegenerate: {d.nondegenerate}")
    text.append(f"gram positive definite: {d.gram_pd}")
    if d.is_member:
        text.append(f"fundamental random vector: member of M_reg^{{1,{d.k}}}")
    else:
        text.append(f"not a member of M_reg^{{1,{d.k}}}:")
        text += [f"  {v}" for v in d.violations()]
    doc = {
        "k": d.k,
        "second_moments": d.second_moments,
        "cross_moments": {f"X{a + 1},X{b + 1}": c for (a, b), c in d.cross_moments.items()},
        "nondegenerate": d.nondegenerate,
        "orthogonal_set": {f"X{a + 1},X{b + 1}": ok for (a, b), ok in d.orthogonal_set.items()},
        "gram_pd": d.gram_pd,
        "l2_finite": d.l2_finite,
        "is_fundamental": d.is_fundamental,
        "is_member": d.is_member,
        "violations": d.violations(),
    }
    _emit(args, doc, text)
    return EXIT_OK if d.is_member else EXIT_FAIL


def cmd_project(args) -> int:
    spec = _load_vector(args.spec)
    smap = source_map(spec.sources)
    res = decompose(spec.Y, spec.X, smap)
    eps = res.canonical_error
    unc = check_zero_mean_and_uncorrelated(res, spec.X, smap)
    e_mean = expectation(eps, smap)
    e_m2 = expectation(eps * eps, smap)
    text = [
        f"beta = {vec(res.beta)}",
        f"canonical error = {eps}",
        f"E eps = {g(e_mean)}",
        f"E eps^2 = {g(e_m2)}",
        f"MSE at beta = {g(res.mse_at_beta)}",
        f"E X_j eps = {vec(unc.orthogonality)}",
        f"regressors orthogonal: {res.orthogonal_regressors}",
    ]
    text += [f"note: {n}" for n in unc.notes]
    doc = {
        "beta": res.beta,
        "canonical_error": str(eps),
        "error_mean": e_mean,
        "error_second_moment": e_m2,
        "mse": res.mse_at_beta,
        "gram": res.gram,
        "cross": res.cross,
        "orthogonality": unc.orthogonality,
        "covariances": unc.covariances,
        "orthogonal_regressors": res.orthogonal_regressors,
        "notes": unc.notes,
    }
    code = EXIT_OK
    if args.via_orthogonalization:
        beta_o, alpha, orth = projection_via_orthogonalization(spec.Y, spec.X, smap)
        gap = float(np.max(np.abs(beta_o - res.beta)))
        agree = gap <= PATH_AGREEMENT_TOL
        text.append("A =")
        text += ["  [" + ", ".join(g(x) for x in row) + "]" for row in orth.A]
        text += [f"alpha = {vec(alpha)}", f"beta via orthogonalization = {vec(beta_o)}",
                 f"path agreement: {'yes' if agree else 'NO'} (max gap {gap:.3g})"]
        doc.update({"A": orth.A, "alpha": alpha, "beta_orthogonalized": beta_o, "path_gap": gap, "paths_agree": agree})
        if not agree:
            code = EXIT_FAIL
    _emit(args, doc, text)
    return code


def cmd_counterexample(args) -> int:
    if args.name not in cx.CASES:
        raise _Usage(f"unknown counterexample {args.name!r}; valid names: {', '.join(cx.CASES)}")
    try:
        case = cx.build_case(args.name, t=args.t, sigma=args.sigma)
    except cx.CounterexampleRejected as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    reports = [cx.verify(case, "exact")]
    if args.mc is not None:
        n, seed = args.mc
        if n < 2 or seed < 0:
            raise _Usage("--mc needs n >= 2 and a nonnegative seed")
        reports.append(cx.verify(case, cx.MonteCarlo(n, seed)))
    text = [f"parameters: {case.parameters}"] if case.parameters else []
    text += [r.table() for r in reports]
    doc = {
        "case": case.name,
        "parameters": case.parameters,
        "reports": [
            {"mode": r.mode, "passed": r.passed,
             "claims": [{"label": c.label, "kind": c.kind, "expected": c.expected, "computed": c.computed,
                         "passed": c.passed, "standard_error": c.standard_error} for c in r.results]}
            for r in reports
        ],
    }
    _emit(args, doc, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _default_schedule(n: int) -> list:
    sched = [m for m in DEFAULT_SCHEDULE if m <= n]
    m = DEFAULT_SCHEDULE[-1] * 10
    while m <= n:
        sched.append(m)
        m *= 10
    if not sched or sched[-1] != n:
        sched.append(n)
    return sched


def _single_source(p: Poly):
    """Name of the source if p is exactly that source, else None."""
    terms = p.terms
    if len(terms) == 1:
        (mono, c), = terms.items()
        if c == 1.0 and len(mono) == 1 and mono[0][1] == 1:
            return mono[0][0]
    return None


def cmd_simulate(args) -> int:
    if args.n < 1:
        raise _Usage("--n must be a positive integer")
    if args.seed < 0 or args.seed >= 2**64:
        raise _Usage("--seed must be an unsigned 64-bit integer")
    if args.bins < 2:
        raise _Usage("--bins must be at least 2")
    if args.schedule:
        try:
            schedule = [int(float(s)) for s in args.schedule.split(",")]
        except ValueError:
            raise _Usage(f"--schedule must be a comma-separated list of sizes, got {args.schedule!r}") from None
        if any(m < 1 for m in schedule):
            raise _Usage("--schedule sizes must be positive")
    else:
        schedule = _default_schedule(args.n)
    spec = _load_vector(args.spec)
    rep = consistency_experiment(spec, schedule, args.seed)
    text = [f"population beta = {vec(rep.beta)}  seed = {args.seed}",
            f"{'n':>10}  {'||beta_hat - beta||_inf':>24}  {'CLT scale':>14}  beta_hat"]
    text += [f"{r.n:>10d}  {g(r.error):>24}  {g(r.predicted):>14}  {vec(r.beta_hat)}" for r in rep.rows]
    text.append(f"error decreased in {rep.decreasing_steps} of {len(rep.rows) - 1} steps")
    doc = {
        "seed": args.seed,
        "beta": rep.beta,
        "consistency": [{"n": r.n, "beta_hat": r.beta_hat, "error": r.error, "clt_scale": r.predicted} for r in rep.rows],
        "decreasing_steps": rep.decreasing_steps,
    }
    if spec.k == 1:
        data = sample(spec, args.n, args.seed)
        bins = empirical_conditional_mean(data.x[:, 0], data.y, args.bins)
        text.append(f"binned conditional mean of Y given X (n = {args.n}, {args.bins} bins)")
        text.append(f"{'center':>14}  {'mean':>14}  {'count':>8}")
        text += [f"{g(b.center):>14}  {g(b.mean):>14}  {b.count:>8d}{'  sparse' if b.sparse else ''}" for b in bins]
        beta = float(rep.beta[0])
        r2_lin = r_squared(bins, lambda c: beta * c)
        text.append(f"R^2 against the projection {g(beta)}*x: {g(r2_lin)}")
        doc["binned_conditional_mean"] = [
            {"center": b.center, "mean": b.mean, "count": b.count, "sparse": b.sparse} for b in bins
        ]
        doc["r2_projection"] = r2_lin
        src = _single_source(spec.X[0])
        if src is not None:
            reg = conditional_expectation(spec.Y, {src}, spec.sources).regression_polynomial
            r2 = r_squared(bins, lambda c: np.broadcast_to(reg.evaluate({src: c}), c.shape))
            text.append(f"E(Y || X) = {reg}; R^2 of bin means against it: {g(r2)}")
            doc["conditional_expectation"] = str(reg)
            doc["r2_conditional_expectation"] = r2
    _emit(args, doc, text)
    return EXIT_OK


# parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slreg", description="Population-level stochastic linear regression toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "json"), default="text")

    v = sub.add_parser("validate", help="check whether a spec is a fundamental random vector")
    v.add_argument("spec")
    common(v)
    v.set_defaults(func=cmd_validate)

    pr = sub.add_parser("project", help="orthogonal projection coefficient, canonical error, MSE")
    pr.add_argument("spec")
    pr.add_argument("--via-orthogonalization", action="store_true")
    common(pr)
    pr.set_defaults(func=cmd_project)

    c = sub.add_parser("counterexample", help="build and verify a catalogued counterexample")
    c.add_argument("name")
    c.add_argument("--t", type=float)
    c.add_argument("--sigma", type=float)
    c.add_argument("--mc", nargs=2, type=int, metavar=("N", "SEED"))
    common(c)
    c.set_defaults(func=cmd_counterexample)

    s = sub.add_parser("simulate", help="OLS consistency and binned conditional means")
    s.add_argument("spec")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--schedule", help="comma-separated sample sizes (default: powers of ten from 1000 to n)")
    s.add_argument("--bins", type=int, default=20)
    common(s)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecFileError as exc:
        print(f"error: {args.spec}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotLinearlyIndependentError, NotAMemberError, FamilyPreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
