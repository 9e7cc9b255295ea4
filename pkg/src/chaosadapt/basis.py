"""Orthonormal Hermite basis evaluation.

Univariate polynomials are probabilists' Hermite polynomials scaled to unit
norm under the standard Gaussian weight. They are evaluated through the
stable normalized three-term recurrence

    psi_0(x) = 1,  psi_1(x) = x,
    psi_{n+1}(x) = (x * psi_n(x) - sqrt(n) * psi_{n-1}(x)) / sqrt(n + 1),

which avoids both factorial overflow and the cancellation of the
monomial-form evaluation. Multivariate terms are tensor products, one
univariate factor per dimension, selected by a multi-index.
"""

import numpy as np

from ._validation import as_points

__all__ = [
    "hermite_normalized",
    "hermite_table",
    "psi_multi",
    "measurement_matrix",
    "rotated_measurement_matrix",
]


def hermite_normalized(n, x):
    """Evaluate the unit-norm Hermite polynomial of order ``n`` at ``x``.

    ``x`` may be a scalar or an array; the result has the shape of ``x``.
    """
    if n < 0:
        raise ValueError(f"polynomial order must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for k in range(1, n):
        prev, cur = cur, (x * cur - np.sqrt(k) * prev) / np.sqrt(k + 1)
    return cur if cur.ndim else float(cur)


def hermite_table(x, max_order):
    """All unit-norm Hermite values up to ``max_order`` in one sweep.

    Returns an array of shape ``(max_order + 1,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((max_order + 1,) + x.shape)
    table[0] = 1.0
    if max_order >= 1:
        table[1] = x
    for k in range(1, max_order):
        table[k + 1] = (x * table[k] - np.sqrt(k) * table[k - 1]) / np.sqrt(k + 1)
    return table


def psi_multi(alpha, point):
    """Tensor-product basis term: product of univariate values per dimension."""
    alpha = np.asarray(alpha, dtype=np.int64)
    point = np.asarray(point, dtype=float)
    if alpha.ndim != 1 or point.ndim != 1 or alpha.shape != point.shape:
        raise ValueError(
            f"multi-index and point dimensions differ: {alpha.shape} vs {point.shape}"
        )
    value = 1.0
    for n, x in zip(alpha, point):
        value *= hermite_normalized(int(n), float(x))
    return value


def measurement_matrix(points, index_set):
    """Basis values at sample points: entry (i, j) is term j at point i.

    ``points`` is an ``(n, d)`` array (a single point is accepted and treated
    as one row); column 0 is always all ones.
    """
    pts, _ = as_points(points, index_set.dimension, name="points")
    if pts.shape[0] == 0:
        raise ValueError("measurement matrix needs at least one point")
    table = hermite_table(pts, index_set.order)  # (Q+1, n, d)
    psi = np.ones((pts.shape[0], len(index_set)))
    for k in range(index_set.dimension):
        orders = index_set.indices[:, k]
        if orders.any():
            psi *= table[orders, :, k].T
    return psi


def rotated_measurement_matrix(projection, points, index_set):
    """Basis values of the projected points: rows are mapped through ``projection``
    before evaluation.

    ``projection`` is a row-orthonormal matrix (or an object with a
    ``matrix`` attribute holding one) with as many rows as ``index_set``
    has dimensions.
    """
    w = np.asarray(getattr(projection, "matrix", projection), dtype=float)
    if w.ndim != 2 or w.shape[0] != index_set.dimension:
        raise ValueError(
            f"projection shape {w.shape} incompatible with a "
            f"{index_set.dimension}-dimensional basis"
        )
    pts, _ = as_points(points, w.shape[1], name="points")
    return measurement_matrix(pts @ w.T, index_set)
