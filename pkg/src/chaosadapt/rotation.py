"""Row-orthonormal projection matrices and the misfit minimization over them.

The projection maps d input Gaussians to d0 << d rotated ones. Fitting it
means minimizing the squared data misfit of a fixed-coefficient expansion
evaluated on the projected inputs, constrained to matrices with
orthonormal rows. The minimization is projected gradient descent with a
backtracking line search; feasibility is restored after every trial step
by re-orthonormalization (modified Gram-Schmidt with a second polish
pass). A leading block of rows can be frozen, in which case only the
remaining rows move and stay orthogonal to the frozen block.

The analytic gradient uses the derivative identity of the unit-norm
Hermite recurrence: differentiating one basis term with respect to a
projected coordinate lowers that coordinate's order by one and scales by
the square root of the original order, so the whole gradient is assembled
from the already-computed basis matrix through the index set's decrement
table.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix
from .basis import measurement_matrix, rotated_measurement_matrix

__all__ = [
    "RankCollapseError",
    "ProjectionMatrix",
    "RotationConfig",
    "RotationResult",
    "retract",
    "random_stiefel",
    "l2_objective",
    "l2_gradient",
    "optimize_rotation",
]

ORTHONORMAL_TOL = 1e-10


class RankCollapseError(ValueError):
    """A free row fell into the span of the rows before it; re-randomize."""


@dataclass
class ProjectionMatrix:
    """A (d0, d) matrix with orthonormal rows; the first ``n_frozen`` rows are
    treated as immutable by the optimizer."""

    matrix: np.ndarray
    n_frozen: int = 0

    def __post_init__(self):
        self.matrix = as_matrix(self.matrix, "projection matrix")
        d0, d = self.matrix.shape
        if d0 > d:
            raise ValueError(f"more rows ({d0}) than columns ({d})")
        if not 0 <= self.n_frozen <= d0:
            raise ValueError(f"n_frozen must be in [0, {d0}], got {self.n_frozen}")
        gram_defect = self.matrix @ self.matrix.T - np.eye(d0)
        if np.linalg.norm(gram_defect) > ORTHONORMAL_TOL:
            raise ValueError(
                "rows are not orthonormal "
                f"(defect {np.linalg.norm(gram_defect):.3e}); use retract() first"
            )

    @property
    def n_rows(self):
        return self.matrix.shape[0]

    @property
    def n_columns(self):
        return self.matrix.shape[1]

    def project(self, points):
        """Map points from the full space to the rotated coordinates."""
        points = np.asarray(points, dtype=float)
        return points @ self.matrix.T


def _orthonormalize_rows(rows, basis):
    """Modified Gram-Schmidt of ``rows`` against ``basis`` and each other,
    with a second polish pass and the sign convention that each row's
    largest-magnitude entry is non-negative."""
    done = list(basis)
    out = []
    for row in rows:
        v = row.astype(float).copy()
        norm_in = np.linalg.norm(v)
        for _ in range(2):  # twice is enough
            for q in done:
                v -= (q @ v) * q
        norm_out = np.linalg.norm(v)
        if norm_out <= max(1e-13, 1e-8 * max(norm_in, 1.0)):
            raise RankCollapseError(
                "a free row is numerically in the span of the rows before it; "
                "draw a fresh random row and retry"
            )
        v /= norm_out
        if v[np.argmax(np.abs(v))] < 0:
            v = -v
        done.append(v)
        out.append(v)
    return out


def retract(matrix, n_frozen=0):
    """Return the row-orthonormalized :class:`ProjectionMatrix` nearest in
    spirit to ``matrix``.

    The first ``n_frozen`` rows must already be orthonormal and are copied
    through verbatim; the remaining rows are orthonormalized against them
    and each other. Raises :class:`RankCollapseError` when a free row has
    no component outside the span of its predecessors.
    """
    matrix = as_matrix(matrix, "matrix")
    d0 = matrix.shape[0]
    if not 0 <= n_frozen <= d0:
        raise ValueError(f"n_frozen must be in [0, {d0}], got {n_frozen}")
    frozen = matrix[:n_frozen]
    if n_frozen:
        defect = np.linalg.norm(frozen @ frozen.T - np.eye(n_frozen))
        if defect > ORTHONORMAL_TOL:
            raise ValueError(f"frozen block is not orthonormal (defect {defect:.3e})")
    free = _orthonormalize_rows(matrix[n_frozen:], frozen)
    stacked = np.vstack([frozen] + [np.atleast_2d(v) for v in free]) if free else frozen.copy()
    return ProjectionMatrix(stacked.reshape(d0, matrix.shape[1]), n_frozen=n_frozen)


def random_stiefel(dimension, n_rows, frozen=None, seed=None, max_retries=10):
    """Random row-orthonormal matrix; optional frozen block on top.

    ``n_rows`` counts only the new random rows; they are drawn Gaussian,
    orthonormalized against the frozen block, and are deterministic for a
    given seed.
    """
    frozen = np.empty((0, dimension)) if frozen is None else as_matrix(frozen, "frozen")
    if frozen.shape[1] != dimension:
        raise ValueError(
            f"frozen block has {frozen.shape[1]} columns, expected {dimension}"
        )
    if frozen.shape[0] + n_rows > dimension:
        raise ValueError(
            f"{frozen.shape[0]} frozen + {n_rows} new rows exceed dimension {dimension}"
        )
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        candidate = np.vstack([frozen, rng.standard_normal((n_rows, dimension))])
        try:
            return retract(candidate, n_frozen=frozen.shape[0])
        except RankCollapseError:
            continue
    raise RankCollapseError(
        f"could not draw {n_rows} independent random rows in {max_retries} tries"
    )


def l2_objective(projection, coefficients, data, index_set):
    """Squared misfit ||outputs - basis(projected inputs) @ coefficients||^2."""
    psi = rotated_measurement_matrix(projection, data.inputs, index_set)
    residual = data.outputs - psi @ np.asarray(coefficients, dtype=float)
    return float(residual @ residual)


def l2_gradient(projection, coefficients, data, index_set):
    """Gradient of :func:`l2_objective` with respect to every projection entry.

    Frozen rows are differentiated too; masking is the optimizer's job.
    """
    w = np.asarray(getattr(projection, "matrix", projection), dtype=float)
    coefficients = np.asarray(coefficients, dtype=float)
    d0 = index_set.dimension
    if w.ndim != 2 or w.shape[0] != d0 or w.shape[1] != data.dimension:
        raise ValueError(
            f"projection shape {w.shape} incompatible with {d0} rotated "
            f"coordinates over {data.dimension} inputs"
        )
    if coefficients.shape != (len(index_set),):
        raise ValueError(
            f"expected {len(index_set)} coefficients, got {coefficients.shape}"
        )
    eta = data.inputs @ w.T
    psi = measurement_matrix(eta, index_set)
    residual = data.outputs - psi @ coefficients
    decrements = index_set.decrement_table()
    orders = index_set.indices
    gradient = np.zeros_like(w)
    for i in range(d0):
        live = decrements[:, i] >= 0
        if not live.any():
            continue
        # derivative of the basis columns w.r.t. rotated coordinate i,
        # contracted with the coefficients
        weights = coefficients[live] * np.sqrt(orders[live, i])
        tangent = psi[:, decrements[live, i]] @ weights
        gradient[i] = -2.0 * ((residual * tangent) @ data.inputs)
    return gradient


def _tangent_project(gradient, matrix, n_frozen):
    """Project the free-row gradient block onto directions that keep the rows
    orthonormal and orthogonal to the frozen block."""
    free = matrix[n_frozen:]
    g = gradient[n_frozen:]
    sym = g @ free.T
    sym = 0.5 * (sym + sym.T)
    tangent = g - sym @ free
    if n_frozen:
        frozen = matrix[:n_frozen]
        tangent = tangent - (g @ frozen.T) @ frozen
    return tangent


@dataclass
class RotationConfig:
    """Line-search and termination settings for the misfit minimization."""

    max_iterations: int = 200
    gradient_tolerance: float = 1e-8
    initial_step: float = 1.0
    shrink_factor: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 50
    restarts: int = 1
    seed: int = 0


@dataclass
class RotationResult:
    projection: ProjectionMatrix
    objective_trace: np.ndarray
    iterations: int
    converged: bool
    stalled: bool = False
    gradient_norm: float = field(default=np.nan)


def _descend(w0, coefficients, data, index_set, config):
    n_frozen = w0.n_frozen
    w = w0.matrix.copy()
    value = l2_objective(w, coefficients, data, index_set)
    trace = [value]
    converged = False
    stalled = False
    gnorm = np.nan
    step = config.initial_step
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        gradient = l2_gradient(w, coefficients, data, index_set)
        tangent = _tangent_project(gradient, w, n_frozen)
        gnorm = float(np.linalg.norm(tangent))
        if gnorm <= config.gradient_tolerance:
            converged = True
            iterations -= 1
            break
        gamma = step
        accepted = False
        for _ in range(config.max_backtracks):
            trial = w.copy()
            trial[n_frozen:] -= gamma * tangent
            try:
                candidate = retract(trial, n_frozen=n_frozen)
            except RankCollapseError:
                gamma *= config.shrink_factor
                continue
            trial_value = l2_objective(candidate, coefficients, data, index_set)
            if trial_value <= value - config.sufficient_decrease * gamma * gnorm**2:
                accepted = True
                break
            gamma *= config.shrink_factor
        if not accepted:
            stalled = True
            break
        w = candidate.matrix
        value = trial_value
        trace.append(value)
        step = min(gamma * 2.0, config.initial_step)
    return RotationResult(
        projection=ProjectionMatrix(w, n_frozen=n_frozen),
        objective_trace=np.asarray(trace),
        iterations=iterations,
        converged=converged,
        stalled=stalled,
        gradient_norm=gnorm,
    )


def optimize_rotation(w0, coefficients, data, index_set, config=None):
    """Minimize the squared misfit at fixed coefficients over the free rows.

    Returns a :class:`RotationResult` whose objective trace is the
    non-increasing sequence of accepted values starting at the initial
    point. With ``config.restarts > 1``, extra descents from random
    frozen-compatible starting points are run and the best final value
    wins; the descent from ``w0`` is always included, so the result never
    does worse than ``w0``. A failed line search returns the current point
    flagged ``stalled``.
    """
    if config is None:
        config = RotationConfig()
    if not isinstance(w0, ProjectionMatrix):
        w0 = ProjectionMatrix(as_matrix(w0, "w0"))
    coefficients = np.asarray(coefficients, dtype=float)
    if w0.n_frozen == w0.n_rows or not np.any(coefficients[1:]):
        # nothing can move, or the expansion has no projection dependence
        value = l2_objective(w0, coefficients, data, index_set)
        return RotationResult(
            projection=w0,
            objective_trace=np.asarray([value]),
            iterations=0,
            converged=True,
            gradient_norm=0.0,
        )
    best = _descend(w0, coefficients, data, index_set, config)
    if config.restarts > 1:
        seeds = np.random.SeedSequence(config.seed).spawn(config.restarts - 1)
        n_free = w0.n_rows - w0.n_frozen
        frozen = w0.matrix[: w0.n_frozen]
        for child in seeds:
            start = random_stiefel(
                w0.n_columns, n_free, frozen=frozen, seed=child
            )
            run = _descend(start, coefficients, data, index_set, config)
            if run.objective_trace[-1] < best.objective_trace[-1]:
                best = run
    return best
