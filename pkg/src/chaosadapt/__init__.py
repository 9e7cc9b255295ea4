"""Sparse polynomial chaos surrogates on learned input rotations.

The package builds low-dimensional Hermite chaos surrogates of scalar
quantities of interest from scattered samples by jointly estimating a
sparse coefficient vector (basis pursuit denoising) and a row-orthonormal
input projection (misfit minimization on the Stiefel manifold), growing
the projection one direction at a time.
"""

__version__ = "0.1.0"

from .adaptation import (
    AdaptationConfig,
    AdaptedExpansion,
    adapt_fixed_dim,
    adapt_successive,
    coefficient_carryover_report,
    linear_regression_direction,
    map_objective,
)
from .bpdn import (
    BpdnProblem,
    DouglasRachfordConfig,
    InfeasibleEpsilonError,
    project_residual_ball,
    residual_norm,
    soft_threshold,
    solve_bpdn,
    solve_ols,
)
from .basis import (
    hermite_normalized,
    measurement_matrix,
    psi_multi,
    rotated_measurement_matrix,
)
from .crossval import CrossValReport, select_epsilon
from .data import Dataset, split_dataset
from .density import DensityCurve, kde_density
from .estimator import AdaptedChaosRegressor
from .expansion import ChaosExpansion
from .indexing import MultiIndexSet, count_basis, enumerate_multiindices
from .mapping import ParameterRange, gaussian_to_uniform, uniform_to_gaussian
from .rotation import (
    ProjectionMatrix,
    RankCollapseError,
    RotationConfig,
    l2_gradient,
    l2_objective,
    optimize_rotation,
    random_stiefel,
    retract,
)
from .testbeds import (
    BurgersSpec,
    RidgeSpec,
    burgers_qoi,
    burgers_solve,
    generate_dataset,
    ridge_exact_adaptation,
    ridge_qoi,
    solve_viscous_burgers,
)

__all__ = [
    "AdaptationConfig",
    "AdaptedChaosRegressor",
    "AdaptedExpansion",
    "BpdnProblem",
    "BurgersSpec",
    "ChaosExpansion",
    "CrossValReport",
    "Dataset",
    "DensityCurve",
    "DouglasRachfordConfig",
    "InfeasibleEpsilonError",
    "MultiIndexSet",
    "ParameterRange",
    "ProjectionMatrix",
    "RankCollapseError",
    "RidgeSpec",
    "RotationConfig",
    "adapt_fixed_dim",
    "adapt_successive",
    "burgers_qoi",
    "burgers_solve",
    "coefficient_carryover_report",
    "count_basis",
    "enumerate_multiindices",
    "gaussian_to_uniform",
    "generate_dataset",
    "hermite_normalized",
    "kde_density",
    "l2_gradient",
    "l2_objective",
    "linear_regression_direction",
    "map_objective",
    "measurement_matrix",
    "optimize_rotation",
    "project_residual_ball",
    "psi_multi",
    "random_stiefel",
    "residual_norm",
    "retract",
    "ridge_exact_adaptation",
    "ridge_qoi",
    "rotated_measurement_matrix",
    "select_epsilon",
    "soft_threshold",
    "solve_bpdn",
    "solve_ols",
    "solve_viscous_burgers",
    "split_dataset",
    "uniform_to_gaussian",
]
