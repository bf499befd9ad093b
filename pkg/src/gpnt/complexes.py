"""Simplicial and product-cell filtered chain complexes over GF(2).

Cells are hashable keys.  Simplices are strictly increasing vertex tuples;
flag simplices are tuples of index sets; blow-up cells are ``(tau, flag)``
pairs.  A chain is a ``frozenset`` of keys (coefficients are 0 or 1).
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Callable, Hashable, Iterable, Iterator

from .gf2 import Gf2Matrix

Key = Hashable
Chain = frozenset
EMPTY = None  # augmentation cell in dimension -1

INF = float("inf")


class InconsistentBirths(ValueError):
    pass


class MapOutsideTarget(KeyError):
    """A constructed map sends a cell to something that is not a target cell."""


def simplex(vertices: Iterable[int]) -> tuple[int, ...]:
    s = tuple(int(v) for v in vertices)
    if not s:
        raise ValueError("a simplex needs at least one vertex")
    if any(b <= a for a, b in zip(s, s[1:])):
        s2 = tuple(sorted(set(s)))
        if len(s2) != len(s):
            raise ValueError(f"repeated vertex in {s}")
        s = s2
    return s


def faces(s: tuple) -> tuple[tuple, ...]:
    """Codimension-one faces of a vertex tuple (deleting one entry)."""
    if len(s) <= 1:
        return ()
    return tuple(s[:i] + s[i + 1 :] for i in range(len(s)))


def all_faces(s: tuple) -> Iterator[tuple]:
    for k in range(1, len(s) + 1):
        yield from combinations(s, k)


def chain_sum(chains: Iterable[Iterable[Key]]) -> Chain:
    acc: set = set()
    for c in chains:
        acc.symmetric_difference_update(c)
    return frozenset(acc)


def _odd(keys: Iterable[Key]) -> Chain:
    acc: set = set()
    for k in keys:
        acc ^= {k}
    return frozenset(acc)


class Filtration(Mapping):
    """Closure-monotone map from simplices to birth scales."""

    def __init__(self, births: Mapping[tuple[int, ...], float] = (), *, check: bool = True):
        self._births = {tuple(s): float(b) for s, b in dict(births).items()}
        if check:
            for s, b in self._births.items():
                if b < 0 or b != b:
                    raise InconsistentBirths(f"birth of {s} must be a nonnegative number, got {b}")
                for f in faces(s):
                    fb = self._births.get(f)
                    if fb is None:
                        raise InconsistentBirths(f"face {f} of {s} is missing")
                    if fb > b:
                        raise InconsistentBirths(f"face {f} born at {fb} after coface {s} at {b}")

    def __getitem__(self, s):
        return self._births[s]

    def __iter__(self):
        return iter(self._births)

    def __len__(self):
        return len(self._births)

    def __repr__(self):
        return f"Filtration({len(self)} simplices)"

    def __eq__(self, other):
        if isinstance(other, Filtration):
            return self._births == other._births
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._births.items()))

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self._births), default=-1)

    def vertices(self) -> list[int]:
        return sorted(s[0] for s in self._births if len(s) == 1)

    def scales(self) -> list[float]:
        return sorted(set(self._births.values()))

    def at(self, alpha: float) -> set[tuple[int, ...]]:
        return {s for s, b in self._births.items() if b <= alpha}

    def chain_complex(self, cap: int | None = None, augmented: bool = False) -> "FilteredChainComplex":
        return FilteredChainComplex.build(self._births, faces_of=faces, cap=cap, augmented=augmented)


def close_and_validate(records: Iterable[tuple[Iterable[int], float]]) -> Filtration:
    """Downward closure of explicit (simplex, birth) records.

    Missing faces inherit the minimum birth over their explicit cofaces; an
    explicit face born after one of its cofaces is an error.
    """
    explicit: dict[tuple[int, ...], float] = {}
    for verts, birth in records:
        s = simplex(verts)
        b = float(birth)
        if b < 0 or b != b:
            raise InconsistentBirths(f"birth of {s} must be a nonnegative number, got {birth}")
        if s in explicit and explicit[s] != b:
            raise InconsistentBirths(f"simplex {s} listed with births {explicit[s]} and {b}")
        explicit[s] = b
    births = dict(explicit)
    for s, b in explicit.items():
        for f in all_faces(s):
            if f == s:
                continue
            if f in explicit:
                if explicit[f] > b:
                    raise InconsistentBirths(f"face {f} born at {explicit[f]} after coface {s} at {b}")
            elif births.get(f, INF) > b:
                births[f] = b
    return Filtration(births)


class FilteredChainComplex:
    """Based GF(2) chain complex with a birth scale per basis cell.

    ``basis(k)`` is ordered by ``(birth, key)``; the global filtration order is
    ``(birth, dim, key)``.  Cells of dimension above ``cap`` are dropped and
    ``truncated`` records whether anything was dropped.
    """

    def __init__(self, cells: Mapping[int, tuple], births: Mapping, face_map: Mapping, *,
                 cap: int, truncated: bool, augmented: bool):
        self._cells = {k: tuple(v) for k, v in cells.items() if v}
        self._births = births
        self._faces = face_map
        self.cap = cap
        self.truncated = truncated
        self.augmented = augmented
        self._boundaries: dict[int, Gf2Matrix] = {}

    @classmethod
    def build(cls, births: Mapping[Key, float], *, faces_of: Callable[[Key], Iterable[Key]],
              dim_of: Callable[[Key], int] | None = None, cap: int | None = None,
              augmented: bool = False) -> "FilteredChainComplex":
        dim_of = dim_of or (lambda s: len(s) - 1)
        by_dim: dict[int, list] = {}
        truncated = False
        top = -1
        for key in births:
            d = dim_of(key)
            if cap is not None and d > cap:
                truncated = True
                continue
            by_dim.setdefault(d, []).append(key)
            top = max(top, d)
        cap = top if cap is None else cap
        bmap = {}
        face_map = {}
        for d, keys in by_dim.items():
            for key in keys:
                bmap[key] = float(births[key])
        for d, keys in by_dim.items():
            for key in keys:
                fs = tuple(faces_of(key)) if d > 0 else ()
                for f in fs:
                    fb = bmap.get(f)
                    if fb is None:
                        raise InconsistentBirths(f"face {f!r} of {key!r} is not a cell")
                    if fb > bmap[key]:
                        raise InconsistentBirths(f"face {f!r} born after {key!r}")
                face_map[key] = fs
        if augmented and by_dim.get(0):
            lowest = min(bmap[v] for v in by_dim[0])
            bmap[EMPTY] = lowest
            by_dim[-1] = [EMPTY]
            for v in by_dim[0]:
                face_map[v] = (EMPTY,)
            face_map[EMPTY] = ()
        cells = {d: sorted(keys, key=lambda c: (bmap[c], c)) for d, keys in by_dim.items()}
        return cls(cells, bmap, face_map, cap=cap, truncated=truncated, augmented=augmented)

    # -- basic queries ------------------------------------------------------

    @property
    def dims(self) -> list[int]:
        return sorted(self._cells)

    @property
    def top_dim(self) -> int:
        return max((d for d in self._cells if d >= 0), default=-1)

    def basis(self, k: int) -> tuple:
        return self._cells.get(k, ())

    def size(self, k: int) -> int:
        return len(self._cells.get(k, ()))

    @cached_property
    def _index(self) -> dict[Key, tuple[int, int]]:
        return {c: (k, i) for k, cells in self._cells.items() for i, c in enumerate(cells)}

    def index(self, k: int, key: Key) -> int:
        d, i = self._index[key]
        if d != k:
            raise KeyError(key)
        return i

    def dim_of(self, key: Key) -> int:
        return self._index[key][0]

    def __contains__(self, key) -> bool:
        return key in self._index

    def __len__(self) -> int:
        return sum(len(v) for k, v in self._cells.items() if k >= 0)

    def __repr__(self):
        sizes = ", ".join(f"{k}:{len(v)}" for k, v in sorted(self._cells.items()))
        return f"FilteredChainComplex({{{sizes}}}, cap={self.cap})"

    def birth(self, key: Key) -> float:
        return self._births[key]

    def faces(self, key: Key) -> tuple:
        return self._faces[key]

    def cells(self) -> list:
        """All cells in filtration order (birth, dim, key)."""
        out = [c for k in sorted(self._cells) for c in self._cells[k]]
        out.sort(key=lambda c: (self._births[c], self._index[c][0], c) if c is not EMPTY
                 else (self._births[c], -1, ()))
        return out

    def scales(self) -> list[float]:
        return sorted({self._births[c] for c in self._index})

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self._cells.items() if k >= 0)

    # -- chains -------------------------------------------------------------

    def boundary(self, k: int) -> Gf2Matrix:
        """Matrix of the boundary map from dimension ``k`` to ``k - 1``."""
        if k not in self._boundaries:
            rows = self.basis(k - 1)
            if k - 1 >= -1 and rows:
                idx = {c: i for i, c in enumerate(rows)}
                cols = [[idx[f] for f in self._faces[c]] for c in self.basis(k)]
            else:
                cols = [[] for _ in self.basis(k)]
            self._boundaries[k] = Gf2Matrix.from_columns(len(rows), cols)
        return self._boundaries[k]

    def boundary_chain(self, chain: Iterable[Key]) -> Chain:
        return _odd(f for c in chain for f in self._faces[c])

    def vector(self, k: int, chain: Iterable[Key]) -> tuple[int, ...]:
        idx = self._index
        out = []
        for c in chain:
            d, i = idx[c]
            if d != k:
                raise ValueError(f"cell {c!r} has dimension {d}, expected {k}")
            out.append(i)
        return tuple(sorted(out))

    def chain(self, k: int, vec: Iterable[int]) -> Chain:
        b = self.basis(k)
        return frozenset(b[i] for i in vec)

    def chain_birth(self, chain: Iterable[Key]) -> float:
        return max((self._births[c] for c in chain), default=-INF)

    # -- sublevel sets ------------------------------------------------------

    def at(self, alpha: float) -> "FilteredChainComplex":
        cells = {k: tuple(c for c in v if self._births[c] <= alpha) for k, v in self._cells.items()}
        if self.augmented and not cells.get(0):
            cells.pop(-1, None)
        keep = {c for v in cells.values() for c in v}
        births = {c: self._births[c] for c in keep}
        face_map = {c: self._faces[c] for c in keep}
        return FilteredChainComplex(cells, births, face_map, cap=self.cap,
                                    truncated=self.truncated, augmented=self.augmented)

    def is_valid(self) -> bool:
        """Boundary of a boundary vanishes and births are monotone along faces."""
        for c in self._index:
            for f in self._faces[c]:
                if self._births[f] > self._births[c]:
                    return False
        for k in self.dims:
            if k - 1 in self._cells and k + 1 in self._cells:
                d = self.boundary(k) @ self.boundary(k + 1)
                if d.nnz():
                    return False
        return True


def complex_at(f: Filtration, alpha: float, cap: int | None = None, augmented: bool = False) -> FilteredChainComplex:
    if alpha < 0:
        raise ValueError("scale must be nonnegative")
    sub = {s: b for s, b in f.items() if b <= alpha}
    return FilteredChainComplex.build(sub, faces_of=faces, cap=cap, augmented=augmented)


def boundary_matrix(c: FilteredChainComplex, k: int) -> Gf2Matrix:
    if k < 0:
        raise ValueError("dimension must be nonnegative")
    return c.boundary(k)


# -- product cells and the diagonal ---------------------------------------


def product_boundary(cell: tuple, left_faces: Callable = faces, right_faces: Callable = faces) -> Chain:
    """Boundary of ``a (x) b``: ``d(a) (x) b + a (x) d(b)``."""
    a, b = cell
    return _odd([(f, b) for f in left_faces(a)] + [(a, g) for g in right_faces(b)])


def alexander_whitney(s: tuple) -> tuple[tuple[tuple, tuple], ...]:
    """Front-face / back-face pairs ``s[:i+1] (x) s[i:]`` for ``i = 0..dim``."""
    return tuple((s[: i + 1], s[i:]) for i in range(len(s)))


# -- maps -------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    ok: bool
    dim: int | None = None
    cell: Key = None
    message: str = ""

    def __bool__(self):
        return self.ok

    @classmethod
    def passed(cls, message: str = "") -> "Verdict":
        return cls(True, message=message)


def _matrix_from(source: FilteredChainComplex, target: FilteredChainComplex, k: int, shift: int,
                 fn: Callable[[Key], Iterable[Key]]) -> Gf2Matrix:
    tk = k + shift
    tbasis = target.basis(tk)
    cols = []
    for cell in source.basis(k):
        col = []
        for t in _odd(fn(cell)):
            try:
                col.append(target.index(tk, t))
            except KeyError:
                raise MapOutsideTarget(f"{cell!r} maps to {t!r}, not a {tk}-cell of the target") from None
        cols.append(col)
    return Gf2Matrix.from_columns(len(tbasis), cols)


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Degree-0 map given by one matrix per source dimension."""

    source: FilteredChainComplex
    target: FilteredChainComplex
    matrices: dict[int, Gf2Matrix]
    name: str = ""

    @classmethod
    def from_function(cls, source, target, fn: Callable[[Key], Iterable[Key]], dims: Iterable[int],
                      name: str = "") -> "ChainMap":
        return cls(source, target, {k: _matrix_from(source, target, k, 0, fn) for k in dims}, name)

    @classmethod
    def inclusion(cls, source, target, dims: Iterable[int], name: str = "inclusion") -> "ChainMap":
        return cls.from_function(source, target, lambda c: (c,), dims, name)

    @property
    def dims(self) -> list[int]:
        return sorted(self.matrices)

    def image(self, cell: Key) -> Chain:
        k = self.source.dim_of(cell)
        col = self.matrices[k].columns[self.source.index(k, cell)]
        return self.target.chain(k, col)

    def apply(self, chain: Iterable[Key]) -> Chain:
        return chain_sum(self.image(c) for c in chain)

    def compose(self, inner: "ChainMap", name: str = "") -> "ChainMap":
        """``self`` after ``inner``."""
        dims = [k for k in inner.dims if k in self.matrices]
        return ChainMap(inner.source, self.target,
                        {k: self.matrices[k] @ inner.matrices[k] for k in dims},
                        name or f"{self.name}.{inner.name}")

    def __eq__(self, other):
        return isinstance(other, ChainMap) and self.matrices == other.matrices

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ChainHomotopy:
    """Degree +1 map: dimension-``k`` source cells to ``(k+1)``-chains of the target."""

    source: FilteredChainComplex
    target: FilteredChainComplex
    matrices: dict[int, Gf2Matrix]
    name: str = ""

    @classmethod
    def from_function(cls, source, target, fn, dims: Iterable[int], name: str = "") -> "ChainHomotopy":
        return cls(source, target, {k: _matrix_from(source, target, k, 1, fn) for k in dims}, name)

    @property
    def dims(self) -> list[int]:
        return sorted(self.matrices)

    def image(self, cell: Key) -> Chain:
        k = self.source.dim_of(cell)
        col = self.matrices[k].columns[self.source.index(k, cell)]
        return self.target.chain(k + 1, col)

    def flip(self, k: int, row: int, col: int) -> "ChainHomotopy":
        mats = dict(self.matrices)
        mats[k] = mats[k].flip(row, col)
        return ChainHomotopy(self.source, self.target, mats, self.name + "*")


def verify_chain_map(f: ChainMap, dims: Iterable[int] | None = None) -> Verdict:
    """Check ``f_{k-1} d_k = d_k f_k`` exactly for each requested ``k``."""
    dims = f.dims if dims is None else sorted(dims)
    for k in dims:
        if k - 1 not in f.matrices or k not in f.matrices:
            continue
        lhs = f.matrices[k - 1] @ f.source.boundary(k)
        rhs = f.target.boundary(k) @ f.matrices[k]
        j = lhs.first_difference(rhs)
        if j is not None:
            return Verdict(False, k, f.source.basis(k)[j], f"{f.name or 'map'} does not commute with the boundary")
    return Verdict.passed()


def verify_chain_homotopy(c: ChainHomotopy, f: ChainMap, g: ChainMap, dims: Iterable[int] | None = None) -> Verdict:
    """Check ``c_{k-1} d_k + d_{k+1} c_k = f_k + g_k`` for each requested ``k``."""
    dims = c.dims if dims is None else sorted(dims)
    for k in dims:
        if k not in f.matrices or k not in g.matrices or k not in c.matrices:
            return Verdict(False, k, None, f"dimension {k} missing from a map")
        rhs = f.matrices[k] + g.matrices[k]
        lhs = c.target.boundary(k + 1) @ c.matrices[k]
        if k - 1 in c.matrices:
            lhs = lhs + c.matrices[k - 1] @ c.source.boundary(k)
        j = lhs.first_difference(rhs)
        if j is not None:
            return Verdict(False, k, c.source.basis(k)[j],
                           f"{c.name or 'homotopy'} fails the homotopy identity")
    return Verdict.passed()


def _lift_fn(image: Callable[[Key], Chain], point_source: bool):
    def lifted(cell):
        tau, sigma = ((), cell) if point_source else cell
        out: set = set()
        for front, back in alexander_whitney(sigma):
            src = front if point_source else (tau, front)
            out ^= {(z, back) for z in image(src)}
        return out

    return lifted


def lift(f: ChainMap, target: FilteredChainComplex, *, point_source: bool = False, name: str = "") -> ChainMap:
    """Lift of a map out of a product complex: ``tau (x) s -> sum_i f(tau (x) s_i) (x) s'_i``.

    With ``point_source`` the source cells are bare simplices ``s`` (a product
    with a point).  The target must contain every produced product cell.
    """
    return ChainMap.from_function(f.source, target, _lift_fn(f.image, point_source), f.dims,
                                  name or f"lift({f.name})")


def lift_homotopy(c: ChainHomotopy, target: FilteredChainComplex, *, point_source: bool = False,
                  name: str = "") -> ChainHomotopy:
    return ChainHomotopy.from_function(c.source, target, _lift_fn(c.image, point_source), c.dims,
                                       name or f"lift({c.name})")
