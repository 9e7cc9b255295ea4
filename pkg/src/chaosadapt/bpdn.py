"""Sparse coefficient recovery by basis pursuit denoising.

Solves

    minimize ||c||_1  subject to  ||u - A c||_2 <= eps

with Douglas-Rachford splitting: the l1 term enters through its proximal
map (soft thresholding) and the constraint through the exact Euclidean
projection onto the residual ball, computed from a singular value
decomposition of ``A`` that is factored once per problem. An ordinary
least squares path is provided for overdetermined stages.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix, as_vector, check_finite

__all__ = [
    "DouglasRachfordConfig",
    "BpdnProblem",
    "BpdnResult",
    "InfeasibleEpsilonError",
    "soft_threshold",
    "project_residual_ball",
    "solve_bpdn",
    "solve_ols",
    "residual_norm",
]


class InfeasibleEpsilonError(ValueError):
    """The fit tolerance is below the smallest attainable residual."""


@dataclass
class DouglasRachfordConfig:
    """Iteration parameters for the splitting solver.

    ``gamma`` scales the proximal step, ``relaxation`` the fixed-point
    update (must lie in (0, 2]). The stop test is the relative change of
    the governing iterate.
    """

    gamma: float = 1.0
    relaxation: float = 1.0
    max_iterations: int = 5000
    stop_tolerance: float = 1e-9

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not 0 < self.relaxation <= 2:
            raise ValueError(f"relaxation must be in (0, 2], got {self.relaxation}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.stop_tolerance <= 0:
            raise ValueError("stop_tolerance must be > 0")


class BpdnProblem:
    """One instance of the denoising problem, with a cached factorization.

    Parameters
    ----------
    matrix : (n, p) array
        Measurement matrix.
    observations : (n,) array
        Data vector.
    epsilon : float
        Fit tolerance, >= 0.
    """

    def __init__(self, matrix, observations, epsilon):
        self.matrix = check_finite(as_matrix(matrix, "matrix"), "matrix")
        self.observations = check_finite(
            as_vector(observations, "observations"), "observations"
        )
        n, p = self.matrix.shape
        if n < 1 or p < 1:
            raise ValueError("matrix must be at least 1x1")
        if self.observations.shape[0] != n:
            raise ValueError(
                f"observations length {self.observations.shape[0]} does not "
                f"match {n} matrix rows"
            )
        if not np.isfinite(epsilon) or epsilon < 0:
            raise ValueError(f"epsilon must be finite and >= 0, got {epsilon}")
        self.epsilon = float(epsilon)
        self._svd = None

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def svd(self):
        """(U, s, Vt) of the matrix, computed on first use and reused."""
        if self._svd is None:
            try:
                u, s, vt = np.linalg.svd(self.matrix, full_matrices=False)
            except np.linalg.LinAlgError as exc:
                raise np.linalg.LinAlgError(
                    f"SVD of the {self.matrix.shape} measurement matrix failed"
                ) from exc
            cutoff = s[0] * max(self.matrix.shape) * np.finfo(float).eps if s.size else 0.0
            proj = u.T @ self.observations
            self._svd = {
                "u": u,
                "s": s,
                "vt": vt,
                "active": s > cutoff,
                "proj": proj,  # observations in the left singular basis
                # squared norm of the observation part outside the column span
                "outside_sq": max(
                    float(self.observations @ self.observations - proj @ proj), 0.0
                ),
            }
        return self._svd

    def min_feasible_residual(self):
        """Smallest value of ||u - A c||_2 over all c (the feasibility floor)."""
        svd = self.svd
        dead = svd["proj"][~svd["active"]]
        return float(np.sqrt(svd["outside_sq"] + dead @ dead))


def soft_threshold(values, threshold):
    """Componentwise shrinkage: sign(v) * max(|v| - t, 0)."""
    if threshold <= 0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    values = np.asarray(values, dtype=float)
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def project_residual_ball(point, problem, max_root_iterations=200):
    """Exact Euclidean projection onto {c : ||u - A c||_2 <= eps}.

    A feasible ``point`` is returned unchanged (as a copy). Otherwise the
    projection lies on the boundary and is recovered from the cached SVD:
    the scalar Lagrange multiplier solves ``||u - A c(mu)|| = eps``, found
    by Newton's method safeguarded with bisection to relative tolerance
    1e-10.
    """
    point = as_vector(point, "point")
    svd = problem.svd
    s, active = svd["s"], svd["active"]
    coords = svd["vt"] @ point
    # residual components in the left singular basis, constant part outside it
    gap = s * coords - svd["proj"]
    const_sq = svd["outside_sq"] + float(gap[~active] @ gap[~active])
    residual_sq = const_sq + float(gap[active] @ gap[active])
    eps = problem.epsilon
    if residual_sq <= eps * eps:
        return point.copy()

    if eps * eps < const_sq * (1.0 - 1e-12):
        raise InfeasibleEpsilonError(
            f"epsilon={eps:.6g} is below the minimal feasible residual "
            f"{np.sqrt(const_sq):.6g}"
        )

    g = gap[active]
    sa = s[active]
    target_sq = eps * eps - const_sq
    new_coords = coords.copy()
    if target_sq <= (1e-12 * max(eps, 1.0)) ** 2:
        # tolerance consumed by the unreachable part: interpolate exactly
        new_coords[active] = svd["proj"][active] / sa
    else:
        # phi(mu) = sum (g_i / (1 + mu s_i^2))^2 - target_sq is convex and
        # decreasing, so Newton from 0 approaches the root from below.
        mu = 0.0
        lo, hi = 0.0, np.inf
        converged = False
        for _ in range(max_root_iterations):
            denom = 1.0 + mu * sa * sa
            terms = (g / denom) ** 2
            active_sq = float(terms.sum())
            if abs(np.sqrt(active_sq + const_sq) - eps) <= 1e-10 * eps:
                converged = True
                break
            phi = active_sq - target_sq
            if phi > 0:
                lo = mu
            else:
                hi = mu
            dphi = float(np.sum(-2.0 * terms * sa * sa / denom))
            step_ok = dphi < 0 and np.isfinite(dphi)
            mu_new = mu - phi / dphi if step_ok else np.inf
            if not (lo < mu_new < hi):
                mu_new = mu * 2.0 + 1.0 if np.isinf(hi) else 0.5 * (lo + hi)
            mu = mu_new
        if not converged:
            raise RuntimeError(
                f"projection root-find did not converge in {max_root_iterations} "
                "iterations"
            )
        denom = 1.0 + mu * sa * sa
        new_coords[active] = (coords[active] + mu * sa * svd["proj"][active]) / denom
    return point + svd["vt"].T @ (new_coords - coords)


@dataclass
class BpdnResult:
    coefficients: np.ndarray
    iterations: int
    converged: bool
    # fixed-point residual ||z_{k+1} - z_k|| per iteration (nonexpansiveness
    # makes it non-increasing, a cheap health check)
    fixed_point_residuals: np.ndarray = field(repr=False, default=None)


def solve_bpdn(problem, config=None, c0=None):
    """Run Douglas-Rachford splitting on a :class:`BpdnProblem`.

    The returned coefficients are always feasible (they come from the ball
    projection); ``converged`` reports whether the fixed-point iteration
    met the stop tolerance before the iteration cap. A warm start ``c0``
    seeds the governing iterate.
    """
    if config is None:
        config = DouglasRachfordConfig()
    floor = problem.min_feasible_residual()
    if problem.epsilon < floor * (1.0 - 1e-9) - 1e-14:
        raise InfeasibleEpsilonError(
            f"epsilon={problem.epsilon:.6g} is infeasible; the minimal "
            f"feasible residual is {floor:.6g}"
        )
    p = problem.shape[1]
    z = np.zeros(p) if c0 is None else as_vector(c0, "c0").copy()
    if z.shape[0] != p:
        raise ValueError(f"c0 length {z.shape[0]} does not match {p} columns")

    gamma = config.gamma
    lam = config.relaxation
    fp_residuals = np.empty(config.max_iterations)
    converged = False
    x_prev = None
    steady = 0
    x = z
    dx = np.inf
    for k in range(config.max_iterations):
        x = project_residual_ball(z, problem)
        y = soft_threshold(2.0 * x - z, gamma)
        step = lam * (y - x)
        z = z + step
        fp_residuals[k] = float(np.linalg.norm(step))
        # Stop on the relative change of the primal (projected) iterate, three
        # quiet iterations in a row. The primal can sit still early on while
        # the governing iterate travels (fully thresholded warmup), so also
        # require the fixed-point step to be small; it is non-increasing, so
        # this guard cannot fire transiently.
        scale = max(1.0, float(np.linalg.norm(x)))
        if x_prev is not None and fp_residuals[k] <= 1e-3 * scale:
            dx = float(np.linalg.norm(x - x_prev))
            if dx <= config.stop_tolerance * scale:
                steady += 1
                if steady >= 3:
                    converged = True
                    break
            else:
                steady = 0
        x_prev = x
    iterations = k + 1
    if not converged:
        warnings.warn(
            f"Douglas-Rachford stopped at the {iterations}-iteration cap "
            f"(last primal change {dx:.3e}); returning the last feasible iterate",
            stacklevel=2,
        )
    return BpdnResult(
        coefficients=x,
        iterations=iterations,
        converged=converged,
        fixed_point_residuals=fp_residuals[:iterations],
    )


def solve_ols(matrix, observations):
    """Minimum-norm least squares solution via the SVD pseudo-inverse."""
    matrix = as_matrix(matrix, "matrix")
    observations = as_vector(observations, "observations")
    solution, *_ = np.linalg.lstsq(matrix, observations, rcond=None)
    return solution


def residual_norm(matrix, coefficients, observations):
    """Euclidean norm of ``observations - matrix @ coefficients``."""
    matrix = as_matrix(matrix, "matrix")
    coefficients = as_vector(coefficients, "coefficients")
    observations = as_vector(observations, "observations")
    if matrix.shape != (observations.shape[0], coefficients.shape[0]):
        raise ValueError(
            f"shape mismatch: matrix {matrix.shape}, coefficients "
            f"{coefficients.shape}, observations {observations.shape}"
        )
    return float(np.linalg.norm(observations - matrix @ coefficients))
