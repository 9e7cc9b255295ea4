import itertools

import numpy as np
import pytest

from chaosadapt.basis import (
    hermite_normalized,
    hermite_table,
    measurement_matrix,
    psi_multi,
    rotated_measurement_matrix,
)
from chaosadapt.indexing import MultiIndexSet


def factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def monomial_hermite_normalized(n, x):
    """Independent oracle: probabilists' Hermite via the integer coefficient
    recurrence h_{k+1} = x h_k - k h_{k-1}, evaluated in monomial form and
    normalized by sqrt(n!)."""
    coeffs = [np.array([1.0]), np.array([0.0, 1.0])]
    for k in range(1, max(n, 1)):
        grown = np.concatenate([[0.0], coeffs[k]])  # x * h_k
        lowered = coeffs[k - 1] * k
        grown[: lowered.size] -= lowered
        coeffs.append(grown)
    return np.polynomial.polynomial.polyval(x, coeffs[n]) / np.sqrt(factorial(n))


def gauss_hermite_rule(order):
    """Probabilists' Gauss-Hermite nodes/weights normalized to a unit
    Gaussian measure."""
    nodes, weights = np.polynomial.hermite_e.hermegauss(order)
    return nodes, weights / np.sqrt(2.0 * np.pi)


def test_hermite_trivial_values():
    assert hermite_normalized(2, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert hermite_normalized(3, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert hermite_normalized(2, 2.0) == pytest.approx(3.0 / np.sqrt(2.0), rel=1e-14)
    assert hermite_normalized(0, 5.0) == 1.0
    assert hermite_normalized(1, -2.5) == -2.5


def test_recurrence_matches_monomial_evaluation():
    xs = np.linspace(-4.0, 4.0, 33)
    for n in range(9):
        ours = hermite_normalized(n, xs)
        oracle = monomial_hermite_normalized(n, xs)
        scale = np.maximum(np.abs(oracle), 1.0)
        assert np.all(np.abs(ours - oracle) / scale < 1e-8)


def test_derivative_identity_by_central_differences():
    h = 1e-5
    xs = np.linspace(-3.0, 3.0, 13)
    for n in range(1, 7):
        fd = (hermite_normalized(n, xs + h) - hermite_normalized(n, xs - h)) / (2 * h)
        exact = np.sqrt(n) * hermite_normalized(n - 1, xs)
        assert np.allclose(fd, exact, rtol=1e-6, atol=1e-8)


def test_hermite_table_consistent_with_scalar():
    xs = np.linspace(-2, 2, 7)
    table = hermite_table(xs, 6)
    for n in range(7):
        assert np.allclose(table[n], hermite_normalized(n, xs), rtol=0, atol=0)


def test_orthonormality_by_gauss_hermite_quadrature():
    # tensor quadrature integrates polynomial products exactly; the Gram
    # matrix of the basis must be the identity to near machine precision
    for d, q in [(1, 5), (2, 4), (3, 3)]:
        index_set = MultiIndexSet(d, q)
        nodes, weights = gauss_hermite_rule(q + 1)
        pts = np.array(list(itertools.product(nodes, repeat=d)))
        wts = np.prod(
            np.array(list(itertools.product(weights, repeat=d))), axis=1
        )
        psi = measurement_matrix(pts, index_set)
        gram = psi.T @ (psi * wts[:, np.newaxis])
        assert np.max(np.abs(gram - np.eye(len(index_set)))) < 1e-10


def test_psi_multi_examples():
    assert psi_multi((0, 0, 0), (1.3, -0.2, 9.0)) == 1.0
    assert psi_multi((2, 0), (0.0, 5.0)) == pytest.approx(-1.0 / np.sqrt(2.0))
    a, b = 0.73, -1.9
    assert psi_multi((1, 1), (a, b)) == pytest.approx(a * b, rel=1e-15)
    with pytest.raises(ValueError):
        psi_multi((1, 2), (0.0,))


def test_measurement_matrix_row_at_origin():
    m = measurement_matrix(np.array([[0.0]]), MultiIndexSet(1, 2))
    assert np.allclose(m, [[1.0, 0.0, -1.0 / np.sqrt(2.0)]])


def test_measurement_matrix_order_zero_is_ones():
    pts = np.random.default_rng(0).standard_normal((7, 3))
    m = measurement_matrix(pts, MultiIndexSet(3, 0))
    assert np.array_equal(m, np.ones((7, 1)))


def test_measurement_matrix_shape_and_first_column():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((180, 12))
    m = measurement_matrix(pts, MultiIndexSet(12, 3))
    assert m.shape == (180, 455)
    assert np.array_equal(m[:, 0], np.ones(180))


def test_measurement_matrix_matches_psi_multi():
    rng = np.random.default_rng(2)
    pts = rng.standard_normal((5, 3))
    index_set = MultiIndexSet(3, 3)
    m = measurement_matrix(pts, index_set)
    for i in range(5):
        for j, alpha in enumerate(index_set):
            assert m[i, j] == pytest.approx(psi_multi(alpha, pts[i]), rel=1e-13)


def test_measurement_matrix_rejects_empty():
    with pytest.raises(ValueError):
        measurement_matrix(np.empty((0, 2)), MultiIndexSet(2, 1))


def test_rotated_matrix_with_identity_is_plain():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((11, 4))
    index_set = MultiIndexSet(4, 2)
    plain = measurement_matrix(pts, index_set)
    rotated = rotated_measurement_matrix(np.eye(4), pts, index_set)
    assert np.array_equal(plain, rotated)


def test_rotated_matrix_with_identity_prefix_selects_coordinates():
    rng = np.random.default_rng(4)
    pts = rng.standard_normal((9, 5))
    index_set = MultiIndexSet(2, 3)
    w = np.eye(5)[:2]
    rotated = rotated_measurement_matrix(w, pts, index_set)
    assert np.array_equal(rotated, measurement_matrix(pts[:, :2], index_set))


def test_rotated_matrix_ridge_direction():
    # averaging row: the rotated coordinate is the normalized sum
    rng = np.random.default_rng(5)
    d = 12
    pts = rng.standard_normal((20, d))
    w = np.full((1, d), d**-0.5)
    index_set = MultiIndexSet(1, 3)
    rotated = rotated_measurement_matrix(w, pts, index_set)
    eta = pts.sum(axis=1) * d**-0.5
    assert np.allclose(rotated, measurement_matrix(eta[:, None], index_set))


def test_rotated_matrix_shape_mismatch():
    with pytest.raises(ValueError):
        rotated_measurement_matrix(
            np.eye(3)[:2], np.zeros((4, 3)), MultiIndexSet(3, 1)
        )
