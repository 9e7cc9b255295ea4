"""Scikit-learn estimator wrapping the successive adaptation driver."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .adaptation import AdaptationConfig, adapt_successive
from .data import Dataset

__all__ = ["AdaptedChaosRegressor"]


class AdaptedChaosRegressor(RegressorMixin, BaseEstimator):
    """Sparse polynomial chaos surrogate on a learned input rotation.

    Fitting grows a row-orthonormal projection one direction at a time up
    to ``n_directions``, alternating sparse coefficient solves with misfit
    minimization over the projection; prediction evaluates the final
    expansion on the projected inputs. Inputs are expected to be samples
    of independent standard Gaussians (use the range mapping helpers for
    physical uniform parameters first).

    Parameters
    ----------
    order : int
        Total polynomial degree of the expansion.
    n_directions : int
        Number of rotated coordinates to grow.
    epsilon : float or "auto"
        Sparse-fit tolerance; "auto" selects it by a validation split.
    restarts : int
        Random restarts per grown direction.
    seed : int
        Seed for every random choice the fit makes.
    config : AdaptationConfig or None
        Full control; overrides the scalar parameters above when given.

    Attributes
    ----------
    results_ : list of AdaptedExpansion
        One fitted surrogate per dimension 1..n_directions.
    result_ : AdaptedExpansion
        The final (widest) surrogate, used by ``predict``/``transform``.
    projection_ : ndarray of shape (n_directions, n_features)
    coefficients_ : ndarray
    """

    def __init__(
        self,
        order=3,
        n_directions=1,
        epsilon="auto",
        restarts=10,
        seed=0,
        config=None,
    ):
        self.order = order
        self.n_directions = n_directions
        self.epsilon = epsilon
        self.restarts = restarts
        self.seed = seed
        self.config = config

    def _make_config(self):
        if self.config is not None:
            return self.config
        return AdaptationConfig(
            epsilon=self.epsilon, restarts=self.restarts, seed=self.seed
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.n_directions > X.shape[1]:
            raise ValueError(
                f"n_directions={self.n_directions} exceeds the "
                f"{X.shape[1]} input features"
            )
        data = Dataset(X, y)
        self.n_features_in_ = X.shape[1]
        self.results_ = adapt_successive(
            data, self.n_directions, self.order, self._make_config()
        )
        self.result_ = self.results_[-1]
        self.projection_ = self.result_.projection.matrix
        self.coefficients_ = self.result_.expansion.coefficients
        return self

    def predict(self, X):
        check_is_fitted(self, "result_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return self.result_.evaluate(X)

    def transform(self, X):
        """Rotated coordinates of the inputs under the fitted projection."""
        check_is_fitted(self, "result_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X @ self.projection_.T

    def sample(self, n, seed=0):
        """Draw surrogate output samples (standard Gaussian inputs)."""
        check_is_fitted(self, "result_")
        return self.result_.sample(n, seed)
