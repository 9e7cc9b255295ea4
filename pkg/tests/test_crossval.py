import numpy as np
import pytest

from chaosadapt.basis import measurement_matrix
from chaosadapt.bpdn import BpdnProblem, DouglasRachfordConfig, solve_bpdn
from chaosadapt.crossval import select_epsilon
from chaosadapt.data import Dataset, split_dataset
from chaosadapt.indexing import MultiIndexSet


def make_polynomial_data(n, d, seed, noise=0.0):
    """Exact degree-2 expansion data plus optional Gaussian noise."""
    rng = np.random.default_rng(seed)
    index_set = MultiIndexSet(d, 2)
    coeffs = np.zeros(len(index_set))
    coeffs[[0, 1, d + 1]] = [1.0, 2.0, -1.5]
    inputs = rng.standard_normal((n, d))
    outputs = measurement_matrix(inputs, index_set) @ coeffs
    if noise > 0:
        bump = rng.standard_normal(n)
        outputs = outputs + noise * bump / np.linalg.norm(bump)
    return Dataset(inputs, outputs), index_set


# --- splitting ---------------------------------------------------------------


def test_split_sizes_and_disjoint_union():
    data, _ = make_polynomial_data(10, 2, seed=0)
    train, valid = split_dataset(data, 8, seed=1)
    assert train.n_samples == 8 and valid.n_samples == 2
    merged = np.vstack([train.inputs, valid.inputs])
    assert sorted(map(tuple, merged)) == sorted(map(tuple, data.inputs))


def test_split_deterministic_and_validated():
    data, _ = make_polynomial_data(12, 2, seed=0)
    a = split_dataset(data, 9, seed=5)
    b = split_dataset(data, 9, seed=5)
    assert np.array_equal(a[0].inputs, b[0].inputs)
    assert np.array_equal(a[1].outputs, b[1].outputs)
    single_train, single_valid = split_dataset(data, data.n_samples - 1, seed=2)
    assert single_valid.n_samples == 1
    with pytest.raises(ValueError):
        split_dataset(data, 0, seed=0)
    with pytest.raises(ValueError):
        split_dataset(data, 12, seed=0)


# --- tolerance selection ------------------------------------------------------


def test_exact_data_selects_near_zero_epsilon():
    data, index_set = make_polynomial_data(60, 2, seed=3)
    grid = np.linalg.norm(data.outputs) * np.logspace(-8, 0, 9)
    report = select_epsilon(data, index_set, grid=grid, seed=0)
    assert report.selected_epsilon < 1e-4 * np.linalg.norm(data.outputs)


def test_scaling_identity_is_exact():
    data, index_set = make_polynomial_data(100, 3, seed=4, noise=0.5)
    report = select_epsilon(data, index_set, train_fraction=0.8, seed=1)
    ratio = report.selected_epsilon / np.nanmin(report.validation_errors)
    assert ratio == np.sqrt(data.n_samples / report.n_train)
    assert report.n_train == 80 and report.n_valid == 20
    # worked return-formula example: min validation error of 0.5 at an
    # 80/100 split selects sqrt(1.25) * 0.5
    assert np.sqrt(100 / 80) * 0.5 == pytest.approx(0.559016994, rel=1e-9)


def test_report_is_deterministic():
    data, index_set = make_polynomial_data(80, 2, seed=5, noise=0.3)
    a = select_epsilon(data, index_set, seed=9)
    b = select_epsilon(data, index_set, seed=9)
    assert a.selected_epsilon == b.selected_epsilon
    assert np.array_equal(a.validation_errors, b.validation_errors, equal_nan=True)


def test_matches_straight_line_reimplementation():
    data, index_set = make_polynomial_data(90, 2, seed=6, noise=0.4)
    seed, fraction = 2, 0.8
    grid = np.linalg.norm(data.outputs) * np.logspace(-3, 0, 6)
    dr = DouglasRachfordConfig()
    report = select_epsilon(
        data, index_set, grid=grid, train_fraction=fraction, seed=seed, dr_config=dr
    )

    # plain-loop re-implementation of the same selection
    n_train = int(np.ceil(fraction * data.n_samples))
    order = np.random.default_rng(seed).permutation(data.n_samples)
    train_rows, valid_rows = np.sort(order[:n_train]), np.sort(order[n_train:])
    psi_train = measurement_matrix(data.inputs[train_rows], index_set)
    psi_valid = measurement_matrix(data.inputs[valid_rows], index_set)
    u_train, u_valid = data.outputs[train_rows], data.outputs[valid_rows]
    errors = []
    warm = None
    for eps in grid:
        result = solve_bpdn(BpdnProblem(psi_train, u_train, eps), dr, c0=warm)
        warm = result.coefficients
        errors.append(np.linalg.norm(u_valid - psi_valid @ result.coefficients))
    expected = np.sqrt(data.n_samples / n_train) * min(errors)

    assert report.selected_epsilon == expected
    assert np.array_equal(report.validation_errors, np.array(errors))


def test_noisy_selection_lands_near_the_noise_level():
    noise = 0.8
    data, index_set = make_polynomial_data(100, 2, seed=7, noise=noise)
    report = select_epsilon(data, index_set, seed=3)
    # the validation residual of a well-chosen tolerance sits at the noise
    # scale; allow a factor of 2 either way
    scaled = np.sqrt(data.n_samples / report.n_train)
    expected = scaled * noise * np.sqrt(report.n_valid / data.n_samples)
    assert expected / 2 <= report.selected_epsilon <= 2 * expected


def test_infeasible_grid_values_skipped_with_warning():
    # overdetermined training system with noise has a positive floor
    data, index_set = make_polynomial_data(100, 2, seed=8, noise=1.0)
    floor_grid = np.array([1e-9, 1e-8, 0.5, 2.0, 10.0])
    with pytest.warns(UserWarning, match="skipped"):
        report = select_epsilon(data, index_set, grid=floor_grid, seed=0)
    assert report.skipped[:2].all()
    assert not report.skipped[2:].any()
    assert np.isnan(report.validation_errors[:2]).all()
    assert np.isfinite(report.validation_errors[2:]).all()


def test_all_grid_values_infeasible_raises():
    data, index_set = make_polynomial_data(100, 2, seed=9, noise=1.0)
    with pytest.raises(ValueError, match="feasibility floor"):
        select_epsilon(data, index_set, grid=np.array([1e-10, 1e-9]), seed=0)


def test_grid_validation():
    data, index_set = make_polynomial_data(30, 2, seed=10)
    with pytest.raises(ValueError):
        select_epsilon(data, index_set, grid=np.array([0.5, 0.4]), seed=0)
    with pytest.raises(ValueError):
        select_epsilon(data, index_set, grid=np.array([]), seed=0)
    with pytest.raises(ValueError):
        select_epsilon(data, index_set, grid=np.array([-1.0, 0.5]), seed=0)
