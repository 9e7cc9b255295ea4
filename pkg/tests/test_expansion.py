import itertools

import numpy as np
import pytest

from chaosadapt.expansion import ChaosExpansion
from chaosadapt.indexing import MultiIndexSet
from chaosadapt.testbeds import RidgeSpec, ridge_exact_adaptation, ridge_qoi


def quadrature_moments_of_ridge(d, n_nodes=12):
    """Oracle: mean and variance of the ridge output through 1-d quadrature
    of the coordinate-sum variable (a centered Gaussian with variance d)."""
    nodes, weights = np.polynomial.hermite_e.hermegauss(n_nodes)
    weights = weights / np.sqrt(2.0 * np.pi)
    s = np.sqrt(d) * nodes
    u = s + 0.25 * s**2 + 0.025 * s**3
    mean = float(weights @ u)
    second = float(weights @ u**2)
    return mean, second - mean**2


def test_coefficient_count_validated():
    with pytest.raises(ValueError):
        ChaosExpansion(MultiIndexSet(2, 2), np.zeros(5))


def test_evaluate_zero_and_constant():
    s = MultiIndexSet(3, 2)
    zero = ChaosExpansion(s, np.zeros(len(s)))
    pts = np.random.default_rng(0).standard_normal((4, 3))
    assert np.array_equal(zero.evaluate(pts), np.zeros(4))
    const = np.zeros(len(s))
    const[0] = 7.0
    assert ChaosExpansion(s, const).evaluate(pts[0]) == 7.0


def test_evaluate_dimension_mismatch():
    e = ChaosExpansion(MultiIndexSet(2, 1), np.zeros(3))
    with pytest.raises(ValueError):
        e.evaluate(np.zeros(3))


def test_ridge_expansion_evaluates_like_the_ridge():
    spec = RidgeSpec(12)
    w, expansion = ridge_exact_adaptation(spec)
    assert expansion.evaluate(np.zeros(1)) == pytest.approx(0.0, abs=1e-12)
    pts = np.random.default_rng(1).standard_normal((50, 12))
    assert np.allclose(
        expansion.evaluate(pts @ w.T), ridge_qoi(spec, pts), atol=1e-10
    )


def test_moments_simple_cases():
    assert ChaosExpansion(MultiIndexSet(1, 0), [5.0]).moments() == (5.0, 0.0)
    assert ChaosExpansion(MultiIndexSet(1, 2), [0.0, 3.0, 4.0]).moments() == (0.0, 25.0)


def test_ridge_moments_match_quadrature_oracle():
    _, expansion = ridge_exact_adaptation(RidgeSpec(12))
    mean, variance = expansion.moments()
    oracle_mean, oracle_var = quadrature_moments_of_ridge(12)
    assert mean == pytest.approx(oracle_mean, rel=1e-12)
    assert variance == pytest.approx(oracle_var, rel=1e-12)
    assert mean == pytest.approx(3.0)
    assert variance == pytest.approx(67.8)


def test_moments_match_monte_carlo_within_clt_bound():
    rng = np.random.default_rng(7)
    s = MultiIndexSet(2, 3)
    coeffs = rng.standard_normal(len(s))
    e = ChaosExpansion(s, coeffs)
    mean, variance = e.moments()
    n = 200_000
    samples = e.sample(n, seed=11)
    # 3 sigma of the CLT bound for the sample mean
    assert abs(samples.mean() - mean) < 3.0 * samples.std() / np.sqrt(n)
    fourth = np.mean((samples - samples.mean()) ** 4)
    var_of_var = (fourth - variance**2) / n
    assert abs(samples.var() - variance) < 3.0 * np.sqrt(max(var_of_var, 0))


def test_sample_constant_and_deterministic():
    e = ChaosExpansion(MultiIndexSet(2, 0), [2.0])
    assert np.array_equal(e.sample(10, seed=3), np.full(10, 2.0))
    s = MultiIndexSet(2, 2)
    e2 = ChaosExpansion(s, np.arange(len(s), dtype=float))
    assert np.array_equal(e2.sample(100, seed=5), e2.sample(100, seed=5))
    assert not np.array_equal(e2.sample(100, seed=5), e2.sample(100, seed=6))


def test_ridge_sampling_matches_oracle_moments():
    _, expansion = ridge_exact_adaptation(RidgeSpec(12))
    samples = expansion.sample(100_000, seed=2)
    assert abs(samples.mean() - 3.0) < 0.1
    assert abs(samples.var() - 67.8) / 67.8 < 0.03
