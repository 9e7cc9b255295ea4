"""Validation-split selection of the sparse-fit tolerance.

A single random split puts ``n_train`` samples in the training set. The
denoising problem is solved on the training rows for every candidate
tolerance on a grid; each solution is scored by its residual on the
held-out rows, and the chosen tolerance is the smallest validation
residual rescaled by sqrt(n_total / n_train) to account for the larger
system the final fit will see.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import measurement_matrix, rotated_measurement_matrix
from .bpdn import BpdnProblem, DouglasRachfordConfig, solve_bpdn
from .data import split_dataset

__all__ = ["CrossValReport", "default_epsilon_grid", "select_epsilon"]


@dataclass
class CrossValReport:
    """Everything the tolerance search produced.

    ``validation_errors`` is aligned with ``epsilon_grid``; entries for
    grid values below the training system's feasibility floor are NaN and
    flagged in ``skipped``. ``argmin_epsilon`` records the grid value whose
    solution scored best, for comparison against the returned
    ``selected_epsilon`` (the rescaled best score itself).
    """

    epsilon_grid: np.ndarray
    validation_errors: np.ndarray
    selected_epsilon: float
    argmin_epsilon: float
    split_seed: int
    n_train: int
    n_valid: int
    skipped: np.ndarray = field(repr=False, default=None)


def default_epsilon_grid(observations, size=12, span=(1e-4, 1.0)):
    """Log-spaced grid scaled to the norm of the training observations."""
    scale = float(np.linalg.norm(observations))
    if scale == 0.0:
        scale = 1.0
    return scale * np.logspace(np.log10(span[0]), np.log10(span[1]), size)


def select_epsilon(
    data,
    index_set,
    projection=None,
    grid=None,
    train_fraction=0.8,
    seed=0,
    dr_config=None,
    grid_size=12,
    grid_span=(1e-4, 1.0),
):
    """Run the tolerance search and return a :class:`CrossValReport`.

    ``projection`` rotates the inputs before basis evaluation; ``None``
    evaluates the basis on the raw inputs (the index set must then match
    the input dimension). Infeasible grid values are skipped with a
    warning; if every value is infeasible a ``ValueError`` is raised.
    """
    if data.n_samples < 2:
        raise ValueError("tolerance selection needs at least 2 samples")
    n_train = int(np.ceil(train_fraction * data.n_samples))
    n_train = min(max(n_train, 1), data.n_samples - 1)
    train, valid = split_dataset(data, n_train, seed)

    if projection is None:
        psi_train = measurement_matrix(train.inputs, index_set)
        psi_valid = measurement_matrix(valid.inputs, index_set)
    else:
        psi_train = rotated_measurement_matrix(projection, train.inputs, index_set)
        psi_valid = rotated_measurement_matrix(projection, valid.inputs, index_set)

    if grid is None:
        grid = default_epsilon_grid(train.outputs, size=grid_size, span=grid_span)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("tolerance grid is empty")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("tolerance grid must be positive and strictly increasing")
    if dr_config is None:
        dr_config = DouglasRachfordConfig()

    floor = BpdnProblem(psi_train, train.outputs, float(grid[-1])).min_feasible_residual()
    errors = np.full(grid.size, np.nan)
    skipped = np.zeros(grid.size, dtype=bool)
    warm = None
    for j, eps in enumerate(grid):
        if eps < floor * (1.0 - 1e-9):
            skipped[j] = True
            continue
        result = solve_bpdn(BpdnProblem(psi_train, train.outputs, eps), dr_config, c0=warm)
        warm = result.coefficients
        errors[j] = float(np.linalg.norm(valid.outputs - psi_valid @ result.coefficients))
    if skipped.any():
        warnings.warn(
            f"{int(skipped.sum())} grid value(s) below the training "
            f"feasibility floor {floor:.3e} were skipped",
            stacklevel=2,
        )
    if skipped.all():
        raise ValueError(
            f"every grid value is below the training feasibility floor {floor:.3e}"
        )

    best = int(np.nanargmin(errors))
    scaling = np.sqrt(data.n_samples / n_train)
    return CrossValReport(
        epsilon_grid=grid,
        validation_errors=errors,
        selected_epsilon=float(scaling * errors[best]),
        argmin_epsilon=float(grid[best]),
        split_seed=seed,
        n_train=n_train,
        n_valid=data.n_samples - n_train,
        skipped=skipped,
    )
