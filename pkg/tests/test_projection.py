import numpy as np
import pytest

from helpers import random_design
from slreg.linalg import NotLinearlyIndependentError, cholesky, spd_solve
from slreg.moments import Gaussian, Poly, expectation
from slreg.projection import (
    check_zero_mean_and_uncorrelated,
    decompose,
    gram_matrix,
    linear_combination,
    mse,
    projection_coefficient,
)

G3 = [Gaussian("x1", 1.0), Gaussian("x2", 1.0), Gaussian("eta", 1.0)]
x1, x2, eta = (Poly.var(n) for n in ("x1", "x2", "eta"))


def test_gram_matrix_examples():
    assert np.array_equal(gram_matrix([x1, x2], G3), np.eye(2))
    assert np.array_equal(gram_matrix([Poly.constant(1.0)], G3), [[1.0]])
    assert np.array_equal(gram_matrix([x1, x1 + eta], G3), [[1.0, 1.0], [1.0, 2.0]])


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_projection_of_x_plus_x_squared(sigma):
    x = Poly.var("x")
    beta = projection_coefficient(x + x * x, [x], [Gaussian("x", sigma**2)])
    assert beta == pytest.approx([1.0], abs=1e-12)


def test_projection_of_zero_and_of_linear_model():
    assert np.array_equal(projection_coefficient(Poly(), [x1, x2], G3), [0.0, 0.0])
    assert projection_coefficient(2 * x1 + 3 * x2 + eta, [x1, x2], G3) == pytest.approx([2.0, 3.0], abs=1e-12)


def test_singular_gram_reports_pivot():
    with pytest.raises(NotLinearlyIndependentError) as err:
        projection_coefficient(x1, [x1, x2, x1 + x2], G3)
    assert err.value.pivot == 2
    with pytest.raises(NotLinearlyIndependentError) as err:
        projection_coefficient(x1, [Poly(), x1], G3)
    assert err.value.pivot == 0


def test_cholesky_matches_numpy():
    a = np.array([[4.0, 2.0, 0.4], [2.0, 3.0, -0.5], [0.4, -0.5, 2.0]])
    assert np.allclose(cholesky(a), np.linalg.cholesky(a), atol=1e-14)
    b = np.array([1.0, -2.0, 0.5])
    assert np.allclose(spd_solve(a, b), np.linalg.solve(a, b), atol=1e-14)


def test_ill_conditioned_gram_rejected():
    a = np.array([[1.0, 0.0], [0.0, 1e-13]])
    with pytest.raises(NotLinearlyIndependentError):
        spd_solve(a, [1.0, 1.0])


def test_decompose_examples():
    x = Poly.var("x")
    g = [Gaussian("x", 1.0)]
    res = decompose(x + x * x, [x], g)
    assert res.canonical_error.pruned(1e-12) == x * x

    res = decompose(2 * x1 - 0.5 * x2, [x1, x2], G3)
    assert res.canonical_error.pruned(1e-12).is_zero()
    assert res.orthogonal_regressors

    res = decompose(x + x**3, [x], g)
    assert res.beta == pytest.approx([4.0], abs=1e-12)
    assert (res.canonical_error - (x**3 - 3 * x)).pruned(1e-12).is_zero()
    assert expectation(x * res.canonical_error, g) == pytest.approx(0.0, abs=1e-12)


def test_mse_examples():
    assert mse(2 * x1 + 3 * x2 + eta, [x1, x2], [2.0, 3.0], G3) == pytest.approx(1.0, abs=1e-12)
    x = Poly.var("x")
    g = [Gaussian("x", 1.0)]
    assert mse(x, [x], [1.0], g) == 0.0
    assert mse(x + x * x, [x], [1.0], g) == pytest.approx(3.0, abs=1e-12)


def test_zero_mean_and_uncorrelated_with_constant_regressor():
    one = Poly.constant(1.0)
    X = [one, x1]
    res = decompose(1.0 + x1 + eta, X, G3)
    rep = check_zero_mean_and_uncorrelated(res, X, G3)
    assert rep.has_constant_regressor and rep.ok
    assert abs(rep.error_mean) <= 1e-12
    assert all(abs(c) <= 1e-12 for c in rep.covariances)


def test_nonzero_mean_error_flagged_without_constant():
    x = Poly.var("x")
    g = [Gaussian("x", 1.0)]
    res = decompose(x * x, [x], g)
    assert res.beta == pytest.approx([0.0], abs=1e-15)
    rep = check_zero_mean_and_uncorrelated(res, [x], g)
    assert rep.orthogonal and not rep.has_constant_regressor
    assert rep.error_mean == pytest.approx(1.0)
    assert any("nonzero mean" in n for n in rep.notes)
    assert rep.ok


def test_zero_error_passes_trivially():
    res = decompose(3 * x1, [x1], G3)
    rep = check_zero_mean_and_uncorrelated(res, [x1], G3)
    assert res.canonical_error.pruned(1e-12).is_zero()
    assert rep.orthogonal and rep.zero_mean and rep.uncorrelated


# properties over random designs -------------------------------------------


@pytest.fixture(scope="module")
def designs():
    rng = np.random.default_rng(101)
    return [random_design(rng) for _ in range(25)]


def test_reconstruction_and_orthogonality(designs):
    for sources, X, Y in designs:
        res = decompose(Y, X, sources)
        recon = Y - (linear_combination(X, res.beta) + res.canonical_error)
        assert recon.pruned(1e-12).is_zero()
        bound = 1e-10 * (1 + np.linalg.norm(res.gram))
        for xj in X:
            assert abs(expectation(xj * res.canonical_error, sources)) <= bound


def test_uniqueness_of_coefficient(designs):
    rng = np.random.default_rng(5)
    for sources, X, Y in designs:
        beta = projection_coefficient(Y, X, sources)
        for _ in range(5):
            b = beta + rng.normal(scale=1e-3, size=beta.size)
            moments = [expectation(xj * (Y - linear_combination(X, b)), sources) for xj in X]
            # a perturbed vector fails the moment conditions
            assert max(abs(m) for m in moments) > 1e-9


def test_mse_pythagoras(designs):
    rng = np.random.default_rng(6)
    for sources, X, Y in designs:
        res = decompose(Y, X, sources)
        for _ in range(5):
            b = res.beta + rng.normal(size=res.beta.size)
            d = b - res.beta
            lhs = mse(Y, X, b, sources)
            rhs = res.mse_at_beta + d @ res.gram @ d
            assert lhs == pytest.approx(rhs, abs=1e-9 * max(1.0, abs(rhs)))


def test_gradient_vanishes_at_beta(designs):
    h = 1e-5
    for sources, X, Y in designs[:10]:
        res = decompose(Y, X, sources)
        grad = np.empty(len(X))
        for j in range(len(X)):
            e = np.zeros(len(X))
            e[j] = h
            grad[j] = (mse(Y, X, res.beta + e, sources) - mse(Y, X, res.beta - e, sources)) / (2 * h)
        assert np.linalg.norm(grad) <= 1e-6 * max(1.0, res.mse_at_beta)
