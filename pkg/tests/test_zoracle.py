import math

import numpy as np
import pytest

from problems import LogisticProblem
from utils.errors import InvalidParamsError, NonFiniteEvaluationError
from zoracle import (
    sample_ball,
    sample_sphere,
    smoothed_gradient,
    smoothed_value,
    variance_report,
    zo_gradient,
    zo_sample,
)


def _mean_and_error(samples: np.ndarray):
    return samples.mean(axis=0), samples.std(axis=0, ddof=1) / math.sqrt(len(samples))


def test_sphere_and_ball_samples():
    rng = np.random.default_rng(0)
    for p in (1, 3, 10):
        assert np.linalg.norm(sample_sphere(p, rng)) == pytest.approx(1.0)
        assert np.linalg.norm(sample_ball(p, rng)) <= 1.0
    assert abs(sample_sphere(1, rng)[0]) == pytest.approx(1.0)


def test_zo_gradient_uses_exactly_two_evaluations():
    calls = []

    def F(x, xi):
        calls.append(xi)
        return float(x @ x)

    zeta = sample_sphere(4, np.random.default_rng(0))
    zo_gradient(F, np.ones(4), 0.1, "batch", zeta)
    assert calls == ["batch", "batch"]


def test_zo_gradient_on_linear_function_is_exact_projection():
    a = np.array([1.0, -2.0, 0.5])
    zeta = sample_sphere(3, np.random.default_rng(1))
    g = zo_gradient(lambda x, xi: float(a @ x), np.zeros(3), 0.3, None, zeta)
    np.testing.assert_allclose(g, 3 * (a @ zeta) * zeta, rtol=1e-9, atol=1e-12)


def test_zo_gradient_rejects_bad_mu_and_nan():
    zeta = np.array([1.0, 0.0])
    with pytest.raises(InvalidParamsError):
        zo_gradient(lambda x, xi: 0.0, np.zeros(2), 0.0, None, zeta)
    with pytest.raises(InvalidParamsError):
        zo_gradient(lambda x, xi: 0.0, np.zeros(2), 1e-13, None, zeta)
    with pytest.raises(NonFiniteEvaluationError):
        zo_gradient(lambda x, xi: float("nan"), np.zeros(2), 0.1, None, zeta)


def test_linear_estimates_are_unbiased():
    a = np.array([0.5, -1.0, 2.0, 0.0])
    rng = np.random.default_rng(0)
    estimates = np.stack([
        zo_sample(lambda x, xi: float(a @ x), np.ones(4), 0.1, None, rng).estimate
        for _ in range(100000)
    ])
    mean, error = _mean_and_error(estimates)
    assert np.all(np.abs(mean - a) <= 4 * error + 1e-12)


@pytest.mark.parametrize("mu", [1e-1, 1e-3])
def test_variance_bound_on_quadratic(mu):
    d = np.array([0.5, 1.0, 2.0, 1.5])
    x = np.array([1.0, -0.5, 0.3, 2.0])
    grad = d * x
    report = variance_report(
        lambda z, xi: float(0.5 * np.sum(d * z * z)),
        x, mu, float(grad @ grad), ell=float(d.max()), samples=5000,
        rng=np.random.default_rng(7),
    )
    assert report.passed, report
    assert report.empirical <= report.tolerance


def test_smoothed_value_of_quadratic():
    p, mu = 3, 0.5
    x = np.array([0.2, -0.4, 1.0])
    est = smoothed_value(lambda z: 0.5 * float(z @ z), x, mu, 20000, np.random.default_rng(2))
    exact = 0.5 * float(x @ x) + 0.5 * mu * mu * p / (p + 2)
    assert abs(est.value - exact) <= 4 * est.std_error


def test_estimates_match_smoothed_gradient_at_frozen_batch():
    problem = LogisticProblem(n=4, p=5, m=20, seed=3)
    rng = np.random.default_rng(11)
    xi = problem.draw(0, rng)
    x = 0.3 * rng.standard_normal(5)
    mu = 0.2

    estimates = np.stack([
        zo_gradient(problem.oracle(0), x, mu, xi, sample_sphere(5, rng)) for _ in range(40000)
    ])
    mean, error = _mean_and_error(estimates)
    reference = smoothed_gradient(lambda z: problem.evaluate(0, z, xi), x, mu, 2000, seed=5)
    tolerance = 4 * np.sqrt(error ** 2 + reference.std_error ** 2) + 1e-6
    assert np.all(np.abs(mean - reference.gradient) <= tolerance)


def test_smoothed_gradient_needs_two_samples():
    with pytest.raises(InvalidParamsError):
        smoothed_gradient(lambda z: 0.0, np.zeros(2), 0.1, 1, seed=0)


def test_sphere_second_moment_is_isotropic():
    rng = np.random.default_rng(4)
    samples = np.stack([sample_sphere(3, rng) for _ in range(100000)])
    assert np.all(np.abs(samples.mean(axis=0)) <= 4 / math.sqrt(len(samples)))
    second = samples.T @ samples / len(samples)
    assert np.max(np.abs(second - np.eye(3) / 3)) <= 0.02
