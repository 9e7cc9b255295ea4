"""Small argument-checking helpers shared across the package."""

import numpy as np

__all__ = ["as_matrix", "as_vector", "as_points", "check_finite"]


def as_matrix(a, name="matrix"):
    """Coerce to a 2-d float array, rejecting anything else."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    return a


def as_vector(a, name="vector"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {a.shape}")
    return a


def as_points(points, dimension, name="points"):
    """Coerce a point or a batch of points to an (n, dimension) array."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[np.newaxis, :]
    if pts.ndim != 2 or pts.shape[1] != dimension:
        raise ValueError(
            f"{name} must have {dimension} coordinates per point, "
            f"got shape {np.shape(points)}"
        )
    return pts, single


def check_finite(a, name="array"):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a
