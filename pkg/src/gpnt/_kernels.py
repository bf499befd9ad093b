"""Bit-packed GF(2) column kernels.

Columns are stored as rows of a ``uint64`` array of shape ``(ncols, nwords)``;
bit ``r`` of column ``j`` lives in word ``r >> 6`` at position ``r & 63``.

Every kernel has a numba implementation and a pure-numpy one.  The numba path
is used when numba imports and ``GPNT_DISABLE_NUMBA`` is unset (or ``0``);
``set_backend`` switches at runtime, which the benchmark and the parity tests
rely on.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

_WORD = 64


def _env_disabled() -> bool:
    flag = os.environ.get("GPNT_DISABLE_NUMBA", "").strip().lower()
    return flag not in ("", "0", "false", "no")


_backend = "numba" if (numba is not None and not _env_disabled()) else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    _backend = name


def nwords(nrows: int) -> int:
    return max(1, (nrows + _WORD - 1) // _WORD)


def pack(columns, nrows: int) -> np.ndarray:
    out = np.zeros((len(columns), nwords(nrows)), dtype=np.uint64)
    lengths = np.fromiter((len(c) for c in columns), dtype=np.int64, count=len(columns))
    total = int(lengths.sum())
    if total:
        rows = np.fromiter((r for c in columns for r in c), dtype=np.int64, count=total)
        cols = np.repeat(np.arange(len(columns), dtype=np.int64), lengths)
        bits = np.left_shift(np.uint64(1), (rows & 63).astype(np.uint64))
        # indices are distinct within a column, so add would do; or is explicit
        np.bitwise_or.at(out, (cols, rows >> 6), bits)
    return out


def unpack(packed: np.ndarray, nrows: int) -> tuple[tuple[int, ...], ...]:
    ncols = packed.shape[0]
    if ncols == 0:
        return ()
    bits = np.unpackbits(np.ascontiguousarray(packed).view(np.uint8), axis=1, bitorder="little")[:, :nrows]
    cols, rows = np.nonzero(bits)
    bounds = np.searchsorted(cols, np.arange(ncols + 1))
    rows = rows.tolist()
    return tuple(tuple(rows[bounds[j]:bounds[j + 1]]) for j in range(ncols))


# ---------------------------------------------------------------------------
# numpy path


def _low_np(row: np.ndarray) -> int:
    nz = np.flatnonzero(row)
    if len(nz) == 0:
        return -1
    w = int(nz[-1])
    return w * _WORD + int(row[w]).bit_length() - 1


def _reduce_np(R: np.ndarray, V: np.ndarray, nrows: int) -> np.ndarray:
    pivot = np.full(nrows, -1, dtype=np.int64)
    for j in range(R.shape[0]):
        low = _low_np(R[j])
        while low >= 0:
            p = pivot[low]
            if p < 0:
                pivot[low] = j
                break
            R[j] ^= R[p]
            V[j] ^= V[p]
            low = _low_np(R[j])
    return pivot


def _solve_np(R, V, pivot, z):
    z = z.copy()
    x = np.zeros(V.shape[1], dtype=np.uint64)
    low = _low_np(z)
    while low >= 0:
        p = pivot[low]
        if p < 0:
            return False, x
        z ^= R[p]
        x ^= V[p]
        low = _low_np(z)
    return True, x


def _matmul_np(A: np.ndarray, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    out = np.zeros((len(indptr) - 1, A.shape[1]), dtype=np.uint64)
    for j in range(len(indptr) - 1):
        sel = indices[indptr[j] : indptr[j + 1]]
        if len(sel):
            out[j] = np.bitwise_xor.reduce(A[sel], axis=0)
    return out


# ---------------------------------------------------------------------------
# numba path

if numba is not None:
    _jit = numba.njit(cache=True, nogil=True)

    @_jit
    def _low_nb(row):
        one = np.uint64(1)
        for w in range(row.shape[0] - 1, -1, -1):
            x = row[w]
            if x != 0:
                b = 63
                while (x >> np.uint64(b)) & one == 0:
                    b -= 1
                return w * 64 + b
        return -1

    @_jit
    def _reduce_nb(R, V, nrows):
        pivot = np.full(nrows, -1, dtype=np.int64)
        nw = R.shape[1]
        nv = V.shape[1]
        for j in range(R.shape[0]):
            low = _low_nb(R[j])
            while low >= 0:
                p = pivot[low]
                if p < 0:
                    pivot[low] = j
                    break
                for w in range(nw):
                    R[j, w] ^= R[p, w]
                for w in range(nv):
                    V[j, w] ^= V[p, w]
                low = _low_nb(R[j])
        return pivot

    @_jit
    def _solve_nb(R, V, pivot, z0):
        z = z0.copy()
        x = np.zeros(V.shape[1], dtype=np.uint64)
        low = _low_nb(z)
        while low >= 0:
            p = pivot[low]
            if p < 0:
                return False, x
            for w in range(z.shape[0]):
                z[w] ^= R[p, w]
            for w in range(x.shape[0]):
                x[w] ^= V[p, w]
            low = _low_nb(z)
        return True, x

    @_jit
    def _matmul_nb(A, indptr, indices):
        ncol = indptr.shape[0] - 1
        out = np.zeros((ncol, A.shape[1]), dtype=np.uint64)
        for j in range(ncol):
            for t in range(indptr[j], indptr[j + 1]):
                i = indices[t]
                for w in range(A.shape[1]):
                    out[j, w] ^= A[i, w]
        return out


# ---------------------------------------------------------------------------
# dispatch


def reduce_columns(R: np.ndarray, V: np.ndarray, nrows: int) -> np.ndarray:
    """Left-to-right column reduction in place; returns the row -> column pivot map."""
    if _backend == "numba":
        return _reduce_nb(R, V, nrows)
    return _reduce_np(R, V, nrows)


def solve(R, V, pivot, z):
    if _backend == "numba":
        ok, x = _solve_nb(R, V, pivot, z)
    else:
        ok, x = _solve_np(R, V, pivot, z)
    return bool(ok), x


def matmul(A: np.ndarray, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    if _backend == "numba":
        return _matmul_nb(A, indptr, indices)
    return _matmul_np(A, indptr, indices)
