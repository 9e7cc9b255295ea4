"""Multi-index bookkeeping for truncated tensor-product polynomial bases.

A basis term is identified by a multi-index: a tuple of per-dimension
polynomial orders whose sum is the total degree. The truncated set of
dimension ``d`` and order ``Q`` contains every multi-index of total degree
at most ``Q`` and has ``binomial(d + Q, Q)`` members. The ordering is
graded lexicographic (by total degree, then lexicographic within each
degree), with the all-zero index first, and is fixed so that coefficient
vectors are comparable across runs and serializable.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np

__all__ = ["count_basis", "enumerate_multiindices", "MultiIndexSet"]


def count_basis(dimension, order):
    """Number of multi-indices of total degree <= ``order`` in ``dimension`` variables.

    Uses exact integer arithmetic, so there is no overflow for any usable
    size (Python integers are unbounded).
    """
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    return comb(dimension + order, order)


def _compositions(total, parts):
    """Yield all tuples of ``parts`` non-negative ints summing to ``total``, in
    lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def enumerate_multiindices(dimension, order):
    """Build the graded-lexicographically ordered :class:`MultiIndexSet`."""
    return MultiIndexSet(dimension, order)


@dataclass
class MultiIndexSet:
    """Ordered truncated multi-index set.

    Attributes
    ----------
    dimension : int
        Number of variables.
    order : int
        Maximum total degree.
    indices : ndarray of shape (n_terms, dimension)
        One multi-index per row, graded-lex ordered; row 0 is all zeros.
    """

    dimension: int
    order: int
    indices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = count_basis(self.dimension, self.order)
        rows = []
        for degree in range(self.order + 1):
            rows.extend(_compositions(degree, self.dimension))
        self.indices = np.array(rows, dtype=np.int64)
        assert self.indices.shape == (n, self.dimension)
        self._positions = None
        self._decrements = None

    def __len__(self):
        return self.indices.shape[0]

    def __iter__(self):
        return (tuple(int(v) for v in row) for row in self.indices)

    @property
    def degrees(self):
        """Total degree of each multi-index."""
        return self.indices.sum(axis=1)

    def position(self, index):
        """Position of a multi-index in the set, or ``KeyError``."""
        if self._positions is None:
            self._positions = {tuple(row): i for i, row in enumerate(self.indices)}
        return self._positions[tuple(index)]

    def decrement_table(self):
        """Positions of each index with one order removed per dimension.

        Entry ``[j, i]`` is the position of ``indices[j] - e_i`` in the set,
        or ``-1`` when ``indices[j, i] == 0``. Computed once and cached; used
        to assemble derivatives of the basis without re-evaluating it.
        """
        if self._decrements is None:
            table = np.full((len(self), self.dimension), -1, dtype=np.int64)
            for j, row in enumerate(self.indices):
                for i in range(self.dimension):
                    if row[i] > 0:
                        lower = row.copy()
                        lower[i] -= 1
                        table[j, i] = self.position(lower)
            self._decrements = table
        return self._decrements

    def pad_positions(self, wider):
        """Map each index into a set with extra trailing variables.

        Returns the position in ``wider`` of every index of this set with
        zeros appended for the new variables. Requires equal order and
        ``wider.dimension >= self.dimension``.
        """
        if wider.order != self.order:
            raise ValueError(
                f"order mismatch: {self.order} vs {wider.order}"
            )
        if wider.dimension < self.dimension:
            raise ValueError("target set has fewer variables")
        extra = wider.dimension - self.dimension
        pos = np.empty(len(self), dtype=np.int64)
        for j, row in enumerate(self.indices):
            pos[j] = wider.position(tuple(row) + (0,) * extra)
        return pos
