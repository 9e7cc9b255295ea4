"""Synthetic quantities of interest for exercising the adaptation pipeline.

Two generators are provided. The ridge testbed is a cubic polynomial of
the coordinate sum, so it is exactly representable as a one-dimensional
cubic expansion of the normalized sum direction and every piece of the
answer is known in closed form. The viscous Burgers testbed drives a
nonlinear initial-boundary value problem with a Gaussian random forcing
and reads off the spatial average of the final-time solution; it is a
genuinely nonlinear map from many inputs to a scalar.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from ._validation import as_points
from .data import Dataset
from .expansion import ChaosExpansion
from .indexing import MultiIndexSet

__all__ = [
    "RidgeSpec",
    "BurgersSpec",
    "NewtonConvergenceError",
    "ridge_qoi",
    "ridge_exact_adaptation",
    "solve_viscous_burgers",
    "burgers_solve",
    "burgers_qoi",
    "generate_dataset",
]


class NewtonConvergenceError(RuntimeError):
    """The implicit step's Newton iteration failed to reach tolerance."""


@dataclass(frozen=True)
class RidgeSpec:
    """Cubic-of-the-sum testbed in ``dimension`` Gaussian inputs."""

    dimension: int = 12

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")


def ridge_qoi(spec, point):
    """s + 0.25 s^2 + 0.025 s^3 with s the coordinate sum.

    Accepts a single point or a batch of rows.
    """
    pts, single = as_points(point, spec.dimension, name="point")
    s = pts.sum(axis=1)
    values = s + 0.25 * s**2 + 0.025 * s**3
    return float(values[0]) if single else values


def ridge_exact_adaptation(spec):
    """The known best single direction and its exact cubic expansion.

    The direction is the normalized all-ones row; rewriting the testbed in
    that coordinate and collecting terms in the unit-norm Hermite basis
    gives the coefficients in closed form.
    """
    d = spec.dimension
    w = np.full((1, d), 1.0 / np.sqrt(d))
    coefficients = np.array(
        [
            0.25 * d,
            np.sqrt(d) + 0.075 * d**1.5,
            0.25 * d * np.sqrt(2.0),
            0.025 * d**1.5 * np.sqrt(6.0),
        ]
    )
    return w, ChaosExpansion(MultiIndexSet(1, 3), coefficients)


@dataclass(frozen=True)
class BurgersSpec:
    """Viscous Burgers testbed configuration.

    ``forcing_case`` selects how the per-mode forcing amplitudes scale:
    ``"i"`` decays like 1/sqrt(mode) and ``"ii"`` spreads 1/n_modes across
    every mode. The grid covers x in [0, 2*pi] with ``nx`` nodes and t in
    [0, 1] with ``nt`` levels; 128 is plenty for testing, 500 matches the
    full-fidelity configuration (see README).
    """

    forcing_dim: int = 20
    nu: float = 0.5
    sigma: float = 2.0
    forcing_case: str = "i"
    nx: int = 128
    nt: int = 128
    newton_tolerance: float = 1e-10
    newton_max_iterations: int = 25

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError(f"viscosity must be > 0, got {self.nu}")
        if self.nx < 16 or self.nt < 16:
            raise ValueError("nx and nt must be >= 16")
        if self.forcing_case not in ("i", "ii"):
            raise ValueError(f"forcing_case must be 'i' or 'ii', got {self.forcing_case!r}")
        if self.forcing_dim < 1:
            raise ValueError("forcing_dim must be >= 1")

    def forcing(self, xi, x, t):
        """sigma * sum_l xi_l * cos(2 l x) cos(2 l pi t) / scale_l at one time."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape != (self.forcing_dim,):
            raise ValueError(
                f"forcing coefficients must have shape ({self.forcing_dim},), "
                f"got {xi.shape}"
            )
        modes = np.arange(1, self.forcing_dim + 1)
        scale = np.sqrt(modes) if self.forcing_case == "i" else float(self.forcing_dim)
        weights = self.sigma * xi * np.cos(2.0 * modes * np.pi * t) / scale
        return np.cos(2.0 * np.outer(x, modes)) @ weights


def solve_viscous_burgers(
    x,
    t,
    nu,
    initial,
    left_boundary,
    right_boundary,
    source=None,
    newton_tolerance=1e-10,
    newton_max_iterations=25,
):
    """March the viscous Burgers equation implicitly on a fixed grid.

    Backward Euler in time; in space, second-order central differences
    with the convection in conservative form d(v^2/2)/dx. Each step solves
    the nonlinear system by Newton iteration with the tridiagonal Jacobian
    (banded direct solves); the source term and the Dirichlet boundary
    values are evaluated at the new time level.

    Parameters
    ----------
    x, t : 1-d arrays
        Uniform space and time grids, boundaries included.
    nu : float
        Viscosity.
    initial : array
        Solution values at ``t[0]`` on ``x``.
    left_boundary, right_boundary : callable
        Boundary values as functions of time.
    source : callable or None
        ``source(x_interior, t_level)`` forcing on interior nodes.

    Returns
    -------
    ndarray of shape (len(t), len(x))
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    dx = x[1] - x[0]
    field = np.empty((t.size, x.size))
    field[0] = np.asarray(initial, dtype=float)
    interior = x[1:-1]

    for n in range(1, t.size):
        dt = t[n] - t[n - 1]
        t_new = t[n]
        v_old = field[n - 1]
        bc_left = float(left_boundary(t_new))
        bc_right = float(right_boundary(t_new))
        forcing = source(interior, t_new) if source is not None else 0.0

        v = v_old.copy()
        v[0], v[-1] = bc_left, bc_right
        converged = False
        for _ in range(newton_max_iterations):
            flux = 0.5 * v**2
            residual = (
                (v[1:-1] - v_old[1:-1]) / dt
                + (flux[2:] - flux[:-2]) / (2.0 * dx)
                - nu * (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dx**2
                - forcing
            )
            if np.linalg.norm(residual) < newton_tolerance:
                converged = True
                break
            m = interior.size
            bands = np.zeros((3, m))
            bands[0, 1:] = v[2:-1] / (2.0 * dx) - nu / dx**2  # super-diagonal
            bands[1, :] = 1.0 / dt + 2.0 * nu / dx**2  # diagonal
            bands[2, :-1] = -v[1:-2] / (2.0 * dx) - nu / dx**2  # sub-diagonal
            v[1:-1] -= solve_banded((1, 1), bands, residual)
        if not converged:
            raise NewtonConvergenceError(
                f"Newton iteration did not reach {newton_tolerance:g} within "
                f"{newton_max_iterations} iterations at time step {n}"
            )
        field[n] = v
    return field


def burgers_solve(spec, xi):
    """Space-time solution field for one draw of the forcing coefficients."""
    x = np.linspace(0.0, 2.0 * np.pi, spec.nx)
    t = np.linspace(0.0, 1.0, spec.nt)
    return solve_viscous_burgers(
        x,
        t,
        spec.nu,
        initial=1.0 + np.sin(2.0 * x),
        left_boundary=lambda s: 1.0 + np.sin(np.pi * s),
        right_boundary=lambda s: 1.0 + np.sin(np.pi * s),
        source=lambda xs, s: spec.forcing(xi, xs, s),
        newton_tolerance=spec.newton_tolerance,
        newton_max_iterations=spec.newton_max_iterations,
    )


def burgers_qoi(spec, xi):
    """Spatial average of the final-time solution (trapezoid rule)."""
    field = burgers_solve(spec, xi)
    x = np.linspace(0.0, 2.0 * np.pi, spec.nx)
    return float(np.trapezoid(field[-1], x) / (2.0 * np.pi))


def generate_dataset(spec, n, seed):
    """Sample the testbed at ``n`` i.i.d. standard-Gaussian inputs."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if isinstance(spec, RidgeSpec):
        inputs = rng.standard_normal((n, spec.dimension))
        outputs = ridge_qoi(spec, inputs)
    elif isinstance(spec, BurgersSpec):
        inputs = rng.standard_normal((n, spec.forcing_dim))
        outputs = np.array([burgers_qoi(spec, row) for row in inputs])
    else:
        raise TypeError(f"unknown testbed spec: {type(spec).__name__}")
    return Dataset(inputs, outputs)
