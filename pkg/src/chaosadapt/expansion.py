"""Truncated chaos expansions: evaluation, moments, and sampling."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_points
from .basis import measurement_matrix
from .indexing import MultiIndexSet

__all__ = ["ChaosExpansion"]


@dataclass
class ChaosExpansion:
    """A series in the orthonormal Hermite basis over a truncated index set.

    The basis is orthonormal under the standard Gaussian measure, so the
    mean is the zeroth coefficient and the variance is the sum of squares
    of all the others.
    """

    index_set: MultiIndexSet
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (len(self.index_set),):
            raise ValueError(
                f"expected {len(self.index_set)} coefficients, "
                f"got shape {self.coefficients.shape}"
            )

    @property
    def dimension(self):
        return self.index_set.dimension

    @property
    def order(self):
        return self.index_set.order

    def evaluate(self, points):
        """Value of the series at one point or at each row of a batch."""
        pts, single = as_points(points, self.dimension, name="points")
        values = measurement_matrix(pts, self.index_set) @ self.coefficients
        return float(values[0]) if single else values

    def moments(self):
        """(mean, variance) under the standard Gaussian input law."""
        mean = float(self.coefficients[0])
        variance = float(np.sum(self.coefficients[1:] ** 2))
        return mean, variance

    def sample(self, n, seed):
        """Evaluate at ``n`` i.i.d. standard-Gaussian inputs.

        Deterministic for a given ``seed``; each call owns its generator.
        """
        if n < 1:
            raise ValueError(f"sample count must be >= 1, got {n}")
        rng = np.random.default_rng(seed)
        points = rng.standard_normal((n, self.dimension))
        return self.evaluate(points)
