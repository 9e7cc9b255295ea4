"""Joint estimation of a sparse expansion and its input projection.

The driver alternates two tractable subproblems until neither moves: a
sparse (or, while the system is overdetermined, least squares) solve for
the coefficients at fixed projection, then a misfit minimization over the
projection at fixed coefficients. Dimension is grown one rotated
coordinate at a time: the rows found for d'-1 are frozen, one random
orthogonal row is appended, and the alternation re-runs optimizing only
the new row together with all coefficients of the wider basis. Each
stage restarts from several random initial rows and keeps the best fit,
since the misfit is non-convex in the projection.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .bpdn import (
    BpdnProblem,
    DouglasRachfordConfig,
    residual_norm,
    solve_bpdn,
    solve_ols,
)
from .basis import rotated_measurement_matrix
from .crossval import default_epsilon_grid, select_epsilon
from .expansion import ChaosExpansion
from .indexing import MultiIndexSet
from .rotation import (
    ProjectionMatrix,
    RankCollapseError,
    RotationConfig,
    optimize_rotation,
    random_stiefel,
    retract,
)

__all__ = [
    "AdaptationConfig",
    "AdaptedExpansion",
    "AdaptationTrace",
    "MapDiagnostic",
    "adapt_fixed_dim",
    "adapt_successive",
    "coefficient_carryover_report",
    "linear_regression_direction",
    "map_objective",
]


@dataclass
class AdaptationConfig:
    """Knobs of the alternating driver.

    ``epsilon`` is the sparse-fit tolerance, or ``"auto"`` to pick it by
    the validation-split search each time a sparse solve is first needed.
    The alternation stops when the relative change of the coefficient
    l1-norm drops below ``tolerance_l1`` and the change of the squared
    misfit below ``tolerance_l2`` (resolved as ``1e-6 * ||outputs||^2``
    when left ``None``), or at ``max_outer_iterations``. Least squares
    replaces the sparse solve while ``n_samples >= ols_factor * n_terms``.
    """

    epsilon: float | str = "auto"
    max_outer_iterations: int = 30
    tolerance_l1: float = 1e-4
    tolerance_l2: float | None = None
    restarts: int = 10
    seed: int = 0
    ols_factor: float = 2.0
    rotation_enabled: bool = True
    dr: DouglasRachfordConfig = field(default_factory=DouglasRachfordConfig)
    rotation: RotationConfig = field(default_factory=RotationConfig)
    cv_train_fraction: float = 0.8
    cv_grid_size: int = 12
    cv_grid_span: tuple = (1e-4, 1.0)

    def __post_init__(self):
        if isinstance(self.epsilon, str):
            if self.epsilon != "auto":
                raise ValueError(f"epsilon must be a number or 'auto', got {self.epsilon!r}")
        elif self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class AdaptationTrace:
    """Per-outer-iteration history of one alternation run."""

    l1_norms: np.ndarray
    objectives: np.ndarray
    constraint_residuals: np.ndarray
    best_iteration: int


@dataclass
class AdaptedExpansion:
    """A low-dimensional expansion together with the projection feeding it.

    Evaluating at a full-dimensional point means projecting it and
    evaluating the stored expansion; ``l2_residual`` is the training
    misfit of exactly the stored pieces and can be recomputed from them.
    """

    projection: ProjectionMatrix
    expansion: ChaosExpansion
    order: int
    fit_epsilon: float
    l2_residual: float
    outer_iterations: int
    trace: AdaptationTrace = field(repr=False, default=None)

    @property
    def n_directions(self):
        return self.projection.n_rows

    def evaluate(self, points):
        return self.expansion.evaluate(self.projection.project(points))

    def sample(self, n, seed):
        """Sample the expansion directly in the rotated coordinates (their
        law is standard Gaussian because the projection rows are
        orthonormal)."""
        return self.expansion.sample(n, seed)

    def variance_share(self, coordinate):
        """Fraction of the expansion variance carried by terms that involve
        the given rotated coordinate."""
        orders = self.expansion.index_set.indices[:, coordinate]
        coeffs = self.expansion.coefficients
        total = float(np.sum(coeffs[1:] ** 2))
        if total == 0.0:
            return 0.0
        return float(np.sum(coeffs[orders > 0] ** 2)) / total


@dataclass
class MapDiagnostic:
    """Value of the penalized-likelihood objective at a candidate pair."""

    tau: float
    sigma: float
    value: float


def map_objective(coefficients, projection, data, index_set, tau, sigma):
    """Evaluate ``(1 / (2 sigma^2)) * misfit^2 + tau * ||c||_1``.

    Diagnostic only: the driver itself always works with the constrained
    formulation, but this is the scalar the alternation can be read as
    descending on.
    """
    if tau <= 0 or sigma <= 0:
        raise ValueError("tau and sigma must be > 0")
    coefficients = np.asarray(coefficients, dtype=float)
    psi = rotated_measurement_matrix(projection, data.inputs, index_set)
    misfit = residual_norm(psi, coefficients, data.outputs)
    value = misfit**2 / (2.0 * sigma**2) + tau * float(np.abs(coefficients).sum())
    return MapDiagnostic(tau=tau, sigma=sigma, value=value)


def _canonicalize(projection, coefficients, index_set):
    """Flip rows to the sign convention (largest-magnitude entry
    non-negative) and absorb the flips into the coefficients, which leaves
    every evaluation of the pair unchanged."""
    w = projection.matrix.copy()
    flips = np.ones(w.shape[0])
    for i, row in enumerate(w):
        if row[np.argmax(np.abs(row))] < 0:
            w[i] = -row
            flips[i] = -1.0
    if np.all(flips > 0):
        return projection, coefficients
    parity = (index_set.indices[:, flips < 0].sum(axis=1)) % 2
    adjusted = np.where(parity == 1, -coefficients, coefficients)
    return ProjectionMatrix(w, n_frozen=projection.n_frozen), adjusted


def _resolve_epsilon(data, index_set, w0, config, seed):
    if not isinstance(config.epsilon, str):
        return float(config.epsilon)
    report = select_epsilon(
        data,
        index_set,
        projection=w0,
        train_fraction=config.cv_train_fraction,
        seed=seed,
        dr_config=config.dr,
        grid_size=config.cv_grid_size,
        grid_span=config.cv_grid_span,
    )
    return report.selected_epsilon


def adapt_fixed_dim(data, n_directions, order, w0=None, c0=None, config=None):
    """Run the alternation at a fixed number of rotated coordinates.

    ``w0`` is the starting projection (a random one is drawn from
    ``config.seed`` when omitted); its frozen rows, if any, are preserved
    verbatim. The returned pair is the best-misfit outer iterate, with
    rows flipped to the sign convention and the coefficients adjusted to
    match.
    """
    if config is None:
        config = AdaptationConfig()
    if not 1 <= n_directions <= data.dimension:
        raise ValueError(
            f"n_directions must be in [1, {data.dimension}], got {n_directions}"
        )
    index_set = MultiIndexSet(n_directions, order)
    if w0 is None:
        w0 = random_stiefel(data.dimension, n_directions, seed=config.seed)
    elif not isinstance(w0, ProjectionMatrix):
        w0 = ProjectionMatrix(np.asarray(w0, dtype=float))
    if w0.n_rows != n_directions or w0.n_columns != data.dimension:
        raise ValueError(
            f"w0 shape {w0.matrix.shape} does not match "
            f"({n_directions}, {data.dimension})"
        )

    n_terms = len(index_set)
    use_ols = data.n_samples >= config.ols_factor * n_terms
    epsilon = np.nan
    if not use_ols:
        epsilon = _resolve_epsilon(data, index_set, w0, config, config.seed)

    tol_l2 = config.tolerance_l2
    if tol_l2 is None:
        tol_l2 = 1e-6 * float(data.outputs @ data.outputs)

    def solve_coefficients(projection, warm):
        psi = rotated_measurement_matrix(projection, data.inputs, index_set)
        if use_ols:
            return psi, solve_ols(psi, data.outputs)
        result = solve_bpdn(BpdnProblem(psi, data.outputs, epsilon), config.dr, c0=warm)
        return psi, result.coefficients

    w = w0
    if c0 is None:
        c = None
        if not use_ols and data.n_samples >= n_terms:
            # cheap warm start for the first sparse solve
            c = solve_ols(
                rotated_measurement_matrix(w, data.inputs, index_set), data.outputs
            )
    else:
        c = np.asarray(c0, dtype=float)
        if c.shape != (n_terms,):
            raise ValueError(f"c0 must have {n_terms} entries, got {c.shape}")

    l1_norms, objectives, residuals = [], [], []
    iterates = []
    prev_l1 = None
    prev_objective = None
    history = [w.matrix.copy()]
    max_outer = config.max_outer_iterations if config.rotation_enabled else 1
    for outer in range(1, max_outer + 1):
        psi, c = solve_coefficients(w, c)
        residual = residual_norm(psi, c, data.outputs)

        if config.rotation_enabled:
            rotated = optimize_rotation(w, c, data, index_set, config.rotation)
            w = rotated.projection
            objective = float(rotated.objective_trace[-1])
            history.append(w.matrix.copy())
            # The alternation converges linearly, so once two projection
            # steps are on record, probe the Aitken-extrapolated point; it
            # is kept only if the misfit with refreshed coefficients is
            # strictly better, which preserves every monotonicity property.
            if len(history) >= 3:
                step_new = history[-1] - history[-2]
                step_old = history[-2] - history[-3]
                n_new, n_old = np.linalg.norm(step_new), np.linalg.norm(step_old)
                if 0.0 < n_new < n_old:
                    ratio = n_new / n_old
                    try:
                        w_probe = retract(
                            history[-1] + (ratio / (1.0 - ratio)) * step_new,
                            n_frozen=w.n_frozen,
                        )
                        psi_probe, c_probe = solve_coefficients(w_probe, c)
                        probe_value = (
                            residual_norm(psi_probe, c_probe, data.outputs) ** 2
                        )
                        if probe_value < objective:
                            w, c, objective = w_probe, c_probe, probe_value
                            residual = np.sqrt(probe_value)
                            history = [w.matrix.copy()]
                    except RankCollapseError:
                        pass
        else:
            objective = residual**2

        l1 = float(np.abs(c).sum())
        l1_norms.append(l1)
        residuals.append(residual)
        objectives.append(objective)
        iterates.append((w, c, objective))

        if prev_l1 is not None:
            l1_change = abs(l1 - prev_l1) / max(prev_l1, 1e-300)
            if l1_change < config.tolerance_l1 and abs(objective - prev_objective) < tol_l2:
                break
        prev_l1, prev_objective = l1, objective

    best = int(np.argmin([obj for (_, _, obj) in iterates]))
    w_best, c_best, _ = iterates[best]
    w_final, c_final = _canonicalize(w_best, c_best, index_set)
    psi_final = rotated_measurement_matrix(w_final, data.inputs, index_set)
    return AdaptedExpansion(
        projection=w_final,
        expansion=ChaosExpansion(index_set, c_final),
        order=order,
        fit_epsilon=float(epsilon),
        l2_residual=residual_norm(psi_final, c_final, data.outputs),
        outer_iterations=len(iterates),
        trace=AdaptationTrace(
            l1_norms=np.asarray(l1_norms),
            objectives=np.asarray(objectives),
            constraint_residuals=np.asarray(residuals),
            best_iteration=best,
        ),
    )


def linear_regression_direction(data):
    """Unit row along the degree-1 regression coefficients of the outputs.

    For any quantity that concentrates on one linear combination of the
    inputs, this is already close to the best single rotated coordinate,
    so it makes a strong deterministic starting candidate next to the
    random ones. Needs more samples than inputs; returns ``None`` when the
    system is too small or the fitted direction is degenerate.
    """
    if data.n_samples < data.dimension + 2:
        return None
    design = np.hstack([np.ones((data.n_samples, 1)), data.inputs])
    slope = solve_ols(design, data.outputs)[1:]
    if not np.isfinite(slope).all() or np.linalg.norm(slope) == 0.0:
        return None
    try:
        return retract(slope[np.newaxis, :])
    except RankCollapseError:
        return None


def adapt_successive(data, max_directions, order, config=None):
    """Grow the projection one row at a time, from 1 up to ``max_directions``.

    Stage d' freezes the d'-1 rows already found, appends one random row
    orthogonal to them (``config.restarts`` independent draws, best final
    misfit wins), and re-runs the alternation over the new row and the
    full coefficient vector of the wider basis. When ``config.epsilon``
    is ``"auto"``, the tolerance is re-estimated once per stage at the
    first candidate projection. Returns one result per dimension, in
    order.
    """
    if config is None:
        config = AdaptationConfig()
    if not 1 <= max_directions <= data.dimension:
        raise ValueError(
            f"max_directions must be in [1, {data.dimension}], got {max_directions}"
        )
    root = np.random.SeedSequence(config.seed)
    stage_seeds = root.spawn(max_directions)
    results = []
    for n_dir in range(1, max_directions + 1):
        frozen = results[-1].projection.matrix if results else None
        index_set = MultiIndexSet(n_dir, order)
        padded = None
        if results:
            positions = results[-1].expansion.index_set.pad_positions(index_set)
            padded = np.zeros(len(index_set))
            padded[positions] = results[-1].expansion.coefficients

        restart_seeds = stage_seeds[n_dir - 1].spawn(config.restarts + 1)
        stage_config = config
        if isinstance(config.epsilon, str) and data.n_samples < config.ols_factor * len(index_set):
            # resolve the tolerance once per stage so every restart solves
            # the same problem
            probe = random_stiefel(
                data.dimension, 1, frozen=frozen, seed=restart_seeds[-1]
            )
            epsilon = _resolve_epsilon(
                data, index_set, probe, config, config.seed + n_dir
            )
            stage_config = replace(config, epsilon=epsilon)

        starts = [
            random_stiefel(data.dimension, 1, frozen=frozen, seed=restart_seeds[r])
            for r in range(config.restarts)
        ]
        if n_dir == 1:
            guess = linear_regression_direction(data)
            if guess is not None:
                starts.insert(0, guess)

        best = None
        for w0 in starts:
            result = adapt_fixed_dim(
                data, n_dir, order, w0=w0, c0=padded, config=stage_config
            )
            if best is None or result.l2_residual < best.l2_residual:
                best = result
        results.append(best)
    return results


def coefficient_carryover_report(results):
    """Compare consecutive stage coefficients on their shared terms.

    For each consecutive pair of results, the narrower stage's indices are
    zero-padded into the wider stage's set and the coefficient differences
    are tabulated. Returns a list of dicts with the aligned arrays.
    """
    report = []
    for previous, current in zip(results, results[1:]):
        if previous.order != current.order:
            raise ValueError(
                f"order mismatch between stages: {previous.order} vs {current.order}"
            )
        narrow = previous.expansion.index_set
        wide = current.expansion.index_set
        positions = narrow.pad_positions(wide)
        prev_c = previous.expansion.coefficients
        curr_c = current.expansion.coefficients[positions]
        report.append(
            {
                "n_directions": (narrow.dimension, wide.dimension),
                "indices": list(narrow),
                "previous": prev_c.copy(),
                "current": curr_c.copy(),
                "difference": curr_c - prev_c,
            }
        )
    return report
