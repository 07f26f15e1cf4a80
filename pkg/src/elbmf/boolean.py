"""Boolean matrices and their semiring algebra.

A :class:`BoolMatrix` is an immutable 0/1 matrix backed by a dense boolean
array. Coordinate access (``from_coords`` / ``coords``) is the ingestion path
for sparse files; the dense plane is what the solver works on.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class BoolMatrix:
    """Immutable Boolean matrix.

    ``BoolMatrix(data)`` accepts anything ``np.asarray`` understands; every
    non-zero entry becomes a one.
    """

    __slots__ = ("_data",)

    def __init__(self, data):
        arr = np.array(data, dtype=bool, copy=True)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-d matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        self._data = arr

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BoolMatrix":
        return cls(np.zeros((n_rows, n_cols), dtype=bool))

    @classmethod
    def ones(cls, n_rows: int, n_cols: int) -> "BoolMatrix":
        return cls(np.ones((n_rows, n_cols), dtype=bool))

    @classmethod
    def from_coords(cls, n_rows: int, n_cols: int, coords: Iterable[tuple[int, int]]) -> "BoolMatrix":
        """Build from 0-based ``(row, col)`` positions of the ones.

        Out-of-range and duplicate positions are rejected.
        """
        idx = np.asarray(list(coords), dtype=np.int64).reshape(-1, 2)
        if idx.size and (
            idx[:, 0].min() < 0 or idx[:, 1].min() < 0
            or idx[:, 0].max() >= n_rows or idx[:, 1].max() >= n_cols
        ):
            raise IndexError(f"coordinate outside a {n_rows}x{n_cols} matrix")
        arr = np.zeros((n_rows, n_cols), dtype=bool)
        arr[idx[:, 0], idx[:, 1]] = True
        if int(arr.sum(dtype=np.int64)) != len(idx):
            raise ValueError("duplicate coordinates")
        return cls(arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self._data.shape

    @property
    def n_rows(self) -> int:
        return self._data.shape[0]

    @property
    def n_cols(self) -> int:
        return self._data.shape[1]

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self._data))

    @property
    def T(self) -> "BoolMatrix":
        return self.transpose()

    def transpose(self) -> "BoolMatrix":
        return BoolMatrix(self._data.T)

    def coords(self) -> np.ndarray:
        """Sorted (row-major) ``nnz x 2`` array of 0-based positions."""
        return np.argwhere(self._data).astype(np.int64)

    def to_dense(self) -> np.ndarray:
        """Read-only boolean view."""
        return self._data

    def astype(self, dtype) -> np.ndarray:
        return self._data.astype(dtype)

    def __array__(self, dtype=None, copy=None):
        return self._data if dtype is None else self._data.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other._data))

    def __hash__(self):
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"BoolMatrix(shape={self.shape}, nnz={self.nnz})"


def as_bool(x) -> np.ndarray:
    """Dense boolean array for a BoolMatrix or array-like."""
    if isinstance(x, BoolMatrix):
        return x.to_dense()
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {arr.shape}")
    return arr.astype(bool, copy=False)


def bool_product(U, V) -> BoolMatrix:
    """Boolean semiring product: ``[U o V]_ij = OR_l (U_il AND V_lj)``."""
    u, v = as_bool(U), as_bool(V)
    if u.shape[1] != v.shape[0]:
        raise DimensionError(f"inner dimensions differ: {u.shape} o {v.shape}")
    # BLAS path; float32 counts stay exact while k < 2**24
    counts = u.astype(np.float32) @ v.astype(np.float32)
    return BoolMatrix(counts > 0)


def xor_loss(A, B) -> int:
    """Number of cells where ``A`` and ``B`` disagree."""
    a, b = as_bool(A), as_bool(B)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a ^ b))


def density(A) -> float:
    a = as_bool(A)
    if a.size == 0:
        raise DimensionError("density of an empty matrix is undefined")
    return np.count_nonzero(a) / a.size
