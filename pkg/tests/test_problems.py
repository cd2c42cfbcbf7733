import math

import numpy as np
import pytest

from conftest import NoGradientProblem
from problems import (
    LogisticProblem,
    ProblemKind,
    analytic_gradient,
    deterministic_quadratic_make,
    logistic_eval,
    make_problem,
    pl_quadratic_make,
)
from utils.errors import InvalidParamsError, UnsupportedKindError


def test_logistic_value_at_origin():
    problem = LogisticProblem(n=4, p=6, m=30, seed=0)
    value = logistic_eval(problem, 0, np.zeros(6), np.random.default_rng(0))
    assert value == pytest.approx(4 * math.log(2.0))


@pytest.mark.parametrize("problem", [
    LogisticProblem(n=3, p=5, m=40, theta=0.1, tau=2.0, seed=1),
    pl_quadratic_make(3, 5, heterogeneity="zero", center=np.arange(5.0)),
    pl_quadratic_make(3, 5, heterogeneity="scaled", seed=2, spread=0.5),
    deterministic_quadratic_make(3, 5),
], ids=["logistic", "pl_zero", "pl_scaled", "deterministic"])
def test_analytic_gradient_matches_finite_differences(problem):
    rng = np.random.default_rng(2)
    h = 1e-6
    for _ in range(100):
        i = int(rng.integers(problem.n))
        xi = problem.draw(i, rng)
        x = rng.standard_normal(problem.p)
        numeric = np.array([
            (problem.evaluate(i, x + h * e, xi) - problem.evaluate(i, x - h * e, xi)) / (2 * h)
            for e in np.eye(problem.p)
        ])
        np.testing.assert_allclose(analytic_gradient(problem, i, x, xi), numeric, rtol=1e-5, atol=1e-7)


def test_logistic_regularizer_is_bounded():
    problem = LogisticProblem(n=2, p=4, theta=0.01, seed=0)
    assert problem.regularizer(1e6 * np.ones(4)) == pytest.approx(0.04, rel=1e-6)


def test_logistic_draws_are_reproducible():
    problem = LogisticProblem(n=2, p=3, m=10, seed=4)
    a = problem.draw(0, np.random.default_rng(8))
    b = problem.draw(0, np.random.default_rng(8))
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)
    assert set(np.unique(a.labels)) <= {-1.0, 1.0}
    np.testing.assert_array_equal(LogisticProblem(p=3, seed=4).hidden, problem.hidden)


def test_logistic_has_no_known_optimum():
    problem = make_problem({"problem": "logistic", "n": 2, "p": 3, "m": 5})
    assert problem.kind is ProblemKind.LOGISTIC_NONCONVEX
    assert problem.f_star is None
    assert problem.constants.describe()["ell"] == "empirical"


def test_pl_quadratic_zero_heterogeneity():
    center = np.array([1.0, -2.0, 0.5])
    problem = pl_quadratic_make(4, 3, heterogeneity="zero", center=center)
    assert problem.f_star == pytest.approx(0.0)
    np.testing.assert_allclose(problem.minimizer, center)
    assert problem.constants.ell == problem.constants.nu == 1.0
    assert problem.global_value(center) == pytest.approx(0.0)
    assert problem.stochastic_gradient_sq(center + 1.0) == pytest.approx(3.0)


def test_pl_quadratic_scaled_minimizer():
    problem = pl_quadratic_make(6, 4, heterogeneity="scaled", seed=3, spread=0.3)
    x_star = problem.minimizer
    np.testing.assert_allclose(problem.global_gradient(x_star), 0.0, atol=1e-12)
    assert problem.f_star > 0
    assert problem.global_value(x_star + 0.1) > problem.f_star
    assert 0.5 <= problem.constants.nu <= problem.constants.ell <= 1.5


def test_deterministic_quadratic_ignores_samples():
    problem = deterministic_quadratic_make(3, 4)
    assert problem.kind is ProblemKind.DETERMINISTIC_QUADRATIC
    assert problem.deterministic
    assert problem.constants.sigma1 == problem.constants.sigma2 == 0.0
    x = np.array([1.0, 2.0, 3.0, 4.0])
    assert problem.evaluate(0, x, None) == problem.evaluate(0, x, "anything")
    np.testing.assert_allclose(problem.gradient(2, x, None), np.linspace(0.5, 2.0, 4) * x)


def test_make_problem_rejects_bad_configs():
    with pytest.raises(InvalidParamsError):
        make_problem({"problem": "rosenbrock"})
    with pytest.raises(InvalidParamsError):
        make_problem({"problem": "logistic", "theta": -1.0})
    with pytest.raises(InvalidParamsError):
        make_problem({"problem": "pl_quadratic", "heterogeneity": "wild"})


def test_analytic_gradient_requires_support():
    with pytest.raises(UnsupportedKindError):
        analytic_gradient(NoGradientProblem(), 0, np.zeros(2), None)


def test_mean_gradient_estimates_are_finite():
    problem = LogisticProblem(n=3, p=4, m=20, seed=0)
    rng = np.random.default_rng(0)
    g = problem.global_gradient(np.zeros(4), rng, 8)
    assert g.shape == (4,)
    assert np.all(np.isfinite(g))
    assert problem.stochastic_gradient_sq(np.zeros(4), rng, 8) > 0


@pytest.mark.parametrize("heterogeneity", ["zero", "scaled"])
def test_pl_inequality_at_random_points(heterogeneity):
    problem = pl_quadratic_make(5, 4, heterogeneity=heterogeneity, center=np.array([1.0, 0.0, -1.0, 2.0]), seed=6)
    nu = problem.constants.nu
    rng = np.random.default_rng(9)
    for _ in range(1000):
        x = 3.0 * rng.standard_normal(4)
        g = problem.global_gradient(x)
        lhs = 0.5 * float(g @ g)
        rhs = nu * (problem.global_value(x) - problem.f_star)
        if heterogeneity == "zero":
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)
        else:
            assert lhs >= rhs - 1e-9 * max(1.0, rhs)
