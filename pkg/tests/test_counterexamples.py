import math

import pytest

from slreg import counterexamples as cx
from slreg.moments import Gaussian, Poly, conditional_expectation, expectation, rademacher

SWEEP = [0.25, 0.5, 1.0, 2.0, 4.0]


def claim(report, label):
    return next(r for r in report.results if r.label == label)


@pytest.mark.parametrize("variance", [1.0, 4.0])
def test_square_error_gaussian(variance):
    case = cx.build_theorem1(Gaussian("x", variance))
    rep = cx.verify(case)
    assert rep.passed
    assert claim(rep, "E[X eps]").computed == 0.0
    assert claim(rep, "E(eps || X)").computed == Poly.var("x", 2)


def test_square_error_rademacher_rejected():
    # xi^2 == 1 on {-1, 1}: the witness is constant, hence trivially mean independent
    with pytest.raises(cx.CounterexampleRejected):
        cx.build_theorem1(rademacher("x"))


def test_square_error_requires_vanishing_third_moment():
    from slreg.moments import FiniteDiscrete

    with pytest.raises(ValueError):
        cx.build_theorem1(FiniteDiscrete("x", ((-1.0, 0.5), (2.0, 0.5))))


def test_product_construction():
    case = cx.build_example1_product()
    rep = cx.verify(case)
    assert rep.passed
    assert claim(rep, "E[X eps]").computed == 0.0
    assert claim(rep, "E(eps || pi2)").computed == Poly.var("pi2", 2)
    assert claim(rep, "E[eps]").computed == pytest.approx(1.0)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_projection_vs_conditional(sigma):
    case = cx.build_corollary1(sigma)
    rep = cx.verify(case)
    assert rep.passed
    assert claim(rep, "projection coefficient E[XY]/E[X^2]").computed == pytest.approx(1.0, abs=1e-12)
    assert claim(rep, "E[witness^2]").computed == pytest.approx(3 * sigma**4, abs=1e-10)


@pytest.mark.parametrize("t", SWEEP)
def test_orthogonal_not_uncorrelated(t):
    rep = cx.verify(cx.build_theorem3_first(t))
    assert rep.passed
    assert abs(claim(rep, "E[X eps]").computed) <= 1e-12
    assert claim(rep, "K(X, eps)").computed == pytest.approx(t, abs=1e-12)


@pytest.mark.parametrize("t", SWEEP)
def test_uncorrelated_not_orthogonal(t):
    rep = cx.verify(cx.build_theorem3_second(t))
    assert rep.passed
    assert claim(rep, "E[X eps]").computed == pytest.approx(t * t, abs=1e-12)
    assert abs(claim(rep, "K(X, eps)").computed) <= 1e-12


@pytest.mark.parametrize("param", SWEEP)
@pytest.mark.parametrize("name", list(cx.CASES))
def test_every_case_passes_across_sweep(name, param):
    assert cx.verify(cx.build_case(name, t=param, sigma=param)).passed


@pytest.mark.parametrize("variance", SWEEP)
def test_square_error_family_over_gaussians(variance):
    x = Poly.var("x")
    srcs = [Gaussian("x", variance)]
    assert expectation(x * x * x, srcs) == 0.0
    assert not conditional_expectation(x * x, {"x"}, srcs).is_constant()


@pytest.mark.parametrize("name", list(cx.CASES))
def test_negative_control_every_claim(name):
    case = cx.build_case(name)
    for i in range(len(case.claims)):
        bad = cx.corrupt(case, i, 10 * 1e-10)
        rep = cx.verify(bad)
        assert not rep.results[i].passed
        assert all(r.passed for j, r in enumerate(rep.results) if j != i)


def test_corrupted_expected_value_is_a_fail_entry():
    case = cx.corrupt(cx.build_theorem3_second(1.0), 1, 1.0)
    rep = cx.verify(case)
    assert not rep.passed
    assert "FAIL  K(X, eps)" in rep.table()


def test_unknown_case_name():
    with pytest.raises(KeyError, match="valid names"):
        cx.build_case("nope")


@pytest.mark.slow
@pytest.mark.parametrize("name", list(cx.CASES))
def test_monte_carlo_agrees_with_exact(name):
    rep = cx.verify(cx.build_case(name), cx.MonteCarlo(1_000_000, 42))
    assert rep.passed, rep.table()


def test_projection_gap_monte_carlo_ratio():
    rep = cx.verify(cx.build_corollary1(1.0), cx.MonteCarlo(1_000_000, 42))
    c = claim(rep, "projection coefficient E[XY]/E[X^2]")
    assert c.passed and abs(c.computed - 1.0) <= 5 * c.standard_error
    # SE of the ratio: sqrt(E[X^2 eps^2]) / E[X^2] / sqrt(n) = sqrt(15) / 1000
    assert c.standard_error == pytest.approx(math.sqrt(15) / 1000, rel=0.05)
