"""Sample container and deterministic train/validation splitting."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix, as_vector, check_finite

__all__ = ["Dataset", "split_dataset"]


@dataclass
class Dataset:
    """Scattered input/output samples: ``inputs`` is (n, d), ``outputs`` is (n,)."""

    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self):
        self.inputs = check_finite(as_matrix(self.inputs, "inputs"), "inputs")
        self.outputs = check_finite(as_vector(self.outputs, "outputs"), "outputs")
        if self.inputs.shape[0] != self.outputs.shape[0]:
            raise ValueError(
                f"{self.inputs.shape[0]} input rows vs "
                f"{self.outputs.shape[0]} outputs"
            )
        if self.inputs.shape[0] < 1:
            raise ValueError("dataset needs at least one sample")

    @property
    def n_samples(self):
        return self.inputs.shape[0]

    @property
    def dimension(self):
        return self.inputs.shape[1]

    def take(self, rows):
        return Dataset(self.inputs[rows], self.outputs[rows])


def split_dataset(data, n_train, seed):
    """Random disjoint train/validation split; deterministic per seed."""
    if not 1 <= n_train < data.n_samples:
        raise ValueError(
            f"n_train must be in [1, {data.n_samples - 1}], got {n_train}"
        )
    order = np.random.default_rng(seed).permutation(data.n_samples)
    return data.take(np.sort(order[:n_train])), data.take(np.sort(order[n_train:]))
