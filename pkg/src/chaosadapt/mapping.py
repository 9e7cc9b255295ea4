"""Mapping physical uniform parameters to standard Gaussian coordinates.

Externally produced campaigns typically vary parameters uniformly over
physical ranges. Each value is normalized to (0, 1) by its range and sent
through the inverse standard-normal CDF; the forward map applies the CDF
(computed through the complementary error function) and rescales. The two
maps round-trip to well below 1e-9.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = ["ParameterRange", "uniform_to_gaussian", "gaussian_to_uniform"]

QUANTILE_CLIP = 1e-12
GAUSSIAN_CLIP = 8.5


@dataclass(frozen=True)
class ParameterRange:
    """A named physical parameter varying uniformly in [lower, upper]."""

    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(
                f"parameter {self.name!r}: lower bound {self.lower} must be "
                f"below upper bound {self.upper}"
            )


def _as_rows(values, n_params, name):
    arr = np.asarray(values, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2 or arr.shape[1] != n_params:
        raise ValueError(f"{name} must have {n_params} columns, got {np.shape(values)}")
    return arr, single


def uniform_to_gaussian(values, ranges):
    """Physical values -> standard Gaussian coordinates, componentwise.

    Values must lie inside their ranges; a value exactly on (or clipped
    against) a boundary is moved to the nearest representable interior
    quantile with a warning, and a value outside its range raises with the
    parameter named.
    """
    arr, single = _as_rows(values, len(ranges), "values")
    quantiles = np.empty_like(arr)
    for j, rng in enumerate(ranges):
        q = (arr[:, j] - rng.lower) / (rng.upper - rng.lower)
        if np.any(q < 0.0) or np.any(q > 1.0):
            bad = arr[np.argmax((q < 0.0) | (q > 1.0)), j]
            raise ValueError(
                f"value {bad!r} of parameter {rng.name!r} lies outside "
                f"[{rng.lower}, {rng.upper}]"
            )
        if np.any(q < QUANTILE_CLIP) or np.any(q > 1.0 - QUANTILE_CLIP):
            warnings.warn(
                f"parameter {rng.name!r} has values at its range boundary; "
                "clipping to the interior",
                stacklevel=2,
            )
            q = np.clip(q, QUANTILE_CLIP, 1.0 - QUANTILE_CLIP)
        quantiles[:, j] = q
    gaussians = ndtri(quantiles)
    return gaussians[0] if single else gaussians


def gaussian_to_uniform(gaussians, ranges):
    """Standard Gaussian coordinates -> physical values, componentwise.

    Coordinates beyond +-8.5 carry quantiles indistinguishable from 0 or 1
    in double precision; they are clipped with a warning.
    """
    arr, single = _as_rows(gaussians, len(ranges), "gaussians")
    if np.any(np.abs(arr) > GAUSSIAN_CLIP):
        warnings.warn(
            f"Gaussian coordinates beyond +-{GAUSSIAN_CLIP} clipped before "
            "mapping to physical ranges",
            stacklevel=2,
        )
        arr = np.clip(arr, -GAUSSIAN_CLIP, GAUSSIAN_CLIP)
    quantiles = ndtr(arr)
    values = np.empty_like(arr)
    for j, rng in enumerate(ranges):
        values[:, j] = rng.lower + (rng.upper - rng.lower) * quantiles[:, j]
    return values[0] if single else values
