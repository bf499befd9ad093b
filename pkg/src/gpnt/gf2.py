"""Sparse linear algebra over the two-element field."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class NoSolution(ArithmeticError):
    """Raised when a right-hand side is not in the column space."""


def _canon(col: Iterable[int]) -> tuple[int, ...]:
    # symmetric difference of repeated indices
    odd: set[int] = set()
    for r in col:
        odd ^= {r}
    return tuple(sorted(odd))


@dataclass(frozen=True, eq=False)
class Gf2Matrix:
    """A ``rows x cols`` matrix stored as sorted row-index tuples per column."""

    rows: int
    cols: int
    columns: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if len(self.columns) != self.cols:
            raise ValueError(f"expected {self.cols} columns, got {len(self.columns)}")
        for col in self.columns:
            if any(b <= a for a, b in zip(col, col[1:])):
                raise ValueError("column indices must be strictly increasing")
            if col and (col[0] < 0 or col[-1] >= self.rows):
                raise ValueError(f"row index out of range for {self.rows} rows")

    @classmethod
    def from_columns(cls, rows: int, columns: Iterable[Iterable[int]]) -> "Gf2Matrix":
        cols = tuple(_canon(c) for c in columns)
        return cls(rows, len(cols), cols)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(rows, cols, ((),) * cols)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n, n, tuple((i,) for i in range(n)))

    @classmethod
    def from_dense(cls, a) -> "Gf2Matrix":
        a = np.asarray(a) % 2
        rows, cols = a.shape
        return cls(rows, cols, tuple(tuple(int(i) for i in np.flatnonzero(a[:, j])) for j in range(cols)))

    @classmethod
    def _from_packed(cls, packed: np.ndarray, rows: int) -> "Gf2Matrix":
        m = cls(rows, packed.shape[0], _kernels.unpack(packed, rows))
        object.__setattr__(m, "packed", packed)
        return m

    @cached_property
    def packed(self) -> np.ndarray:
        return _kernels.pack(self.columns, self.rows)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for j, col in enumerate(self.columns):
            out[list(col), j] = 1
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self.shape == other.shape and self.columns == other.columns

    def __hash__(self):
        return hash((self.rows, self.cols, self.columns))

    def first_difference(self, other: "Gf2Matrix") -> int | None:
        """Index of the first column where the two matrices differ."""
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        for j, (a, b) in enumerate(zip(self.columns, other.columns)):
            if a != b:
                return j
        return None

    def __add__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        cols = tuple(tuple(sorted(set(a) ^ set(b))) for a, b in zip(self.columns, other.columns))
        return Gf2Matrix(self.rows, self.cols, cols)

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        return matmul(self, other)

    def apply(self, vec: Iterable[int]) -> tuple[int, ...]:
        """Image of the column vector with the given support."""
        return _canon(r for j in vec for r in self.columns[j])

    def flip(self, row: int, col: int) -> "Gf2Matrix":
        cols = list(self.columns)
        cols[col] = tuple(sorted(set(cols[col]) ^ {row}))
        return Gf2Matrix(self.rows, self.cols, tuple(cols))


def matmul(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    if b.cols == 0:
        return Gf2Matrix.zeros(a.rows, 0)
    lengths = np.fromiter((len(c) for c in b.columns), dtype=np.int64, count=b.cols)
    indptr = np.zeros(b.cols + 1, dtype=np.int64)
    np.cumsum(lengths, out=indptr[1:])
    indices = np.fromiter((i for c in b.columns for i in c), dtype=np.int64, count=int(indptr[-1]))
    if a.cols == 0:
        return Gf2Matrix.zeros(a.rows, b.cols)
    return Gf2Matrix._from_packed(_kernels.matmul(a.packed, indptr, indices), a.rows)


class ReductionResult:
    """``reduced = input @ basis_change`` with pairwise distinct lowest rows.

    Both matrices stay bit-packed until a caller asks for their columns.
    """

    def __init__(self, R: np.ndarray, V: np.ndarray, rows: int, pivot: np.ndarray):
        self._R, self._V, self._rows, self._pivot_array = R, V, rows, pivot
        self.pivots: dict[int, int] = {int(r): int(c) for r, c in enumerate(pivot) if c >= 0}

    @cached_property
    def reduced(self) -> Gf2Matrix:
        return Gf2Matrix._from_packed(self._R, self._rows)

    @cached_property
    def basis_change(self) -> Gf2Matrix:
        return Gf2Matrix._from_packed(self._V, self._V.shape[0])

    @cached_property
    def zero_columns(self) -> tuple[int, ...]:
        """Indices of columns reduced to zero; their basis-change columns span the kernel."""
        if self._R.shape[0] == 0:
            return ()
        return tuple(int(j) for j in np.flatnonzero(~self._R.any(axis=1)))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def low(self, j: int) -> int:
        col = self.reduced.columns[j]
        return col[-1] if col else -1

    def solve(self, z: Iterable[int]) -> tuple[int, ...]:
        """Canonical ``x`` with ``input @ x = z``; free variables are zero.

        Raises NoSolution when ``z`` is outside the column space.
        """
        rows = self._rows
        z = _canon(z)
        if z and z[-1] >= rows:
            raise ValueError("right-hand side longer than the matrix")
        if not z:
            return ()
        ok, x = _kernels.solve(self._R, self._V, self._pivot_array, _kernels.pack([z], rows)[0])
        if not ok:
            raise NoSolution("vector is not in the column space")
        return _kernels.unpack(x[None, :], self._V.shape[0])[0]


def col_reduce(m: Gf2Matrix) -> ReductionResult:
    """Standard left-to-right reduction: eliminate each column's lowest one
    against the column that already owns that row."""
    R = m.packed.copy()
    V = Gf2Matrix.identity(m.cols).packed.copy()
    pivot = _kernels.reduce_columns(R, V, m.rows)
    return ReductionResult(R, V, m.rows, pivot)


def solve_in_image(m: Gf2Matrix | ReductionResult, z: Sequence[int]) -> tuple[int, ...]:
    """Solve ``m @ x = z``; ``z`` and the result are given by their supports."""
    red = m if isinstance(m, ReductionResult) else col_reduce(m)
    return red.solve(z)


def rank(m: Gf2Matrix) -> int:
    return col_reduce(m).rank
