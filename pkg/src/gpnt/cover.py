"""Cover filtrations, their intersections, nerves, flag complexes and blow-ups."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .complexes import INF, ChainMap, FilteredChainComplex, Filtration, faces

IndexSet = tuple[int, ...]
Flag = tuple[IndexSet, ...]


def index_set(indices: Iterable[int]) -> IndexSet:
    v = tuple(sorted(set(int(i) for i in indices)))
    if not v:
        raise ValueError("index set must be nonempty")
    return v


@dataclass(frozen=True, eq=False)
class CoverFiltration:
    elements: tuple[Filtration, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.elements:
            raise ValueError("a cover needs at least one element")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"U{i}" for i in range(len(self.elements))))
        if len(self.names) != len(self.elements):
            raise ValueError("one name per cover element")

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return isinstance(other, CoverFiltration) and self.elements == other.elements and self.names == other.names

    __hash__ = None

    @cached_property
    def union(self) -> Filtration:
        births: dict = {}
        for el in self.elements:
            for s, b in el.items():
                if b < births.get(s, INF):
                    births[s] = b
        return Filtration(births, check=False)

    @cached_property
    def index_sets(self) -> tuple[IndexSet, ...]:
        """Nonempty index sets whose intersection is eventually nonempty,
        ordered by size then lexicographically."""
        members: dict[int, set[int]] = {}
        for i, el in enumerate(self.elements):
            for s in el:
                if len(s) == 1:
                    members.setdefault(s[0], set()).add(i)
        maximal = {tuple(sorted(m)) for m in members.values()}
        out: set[IndexSet] = set()
        for m in maximal:
            for k in range(1, len(m) + 1):
                out.update(combinations(m, k))
        return tuple(sorted(out, key=lambda v: (len(v), v)))

    def intersection(self, v: Sequence[int]) -> Filtration:
        return intersection_filtration(self, v)


def intersection_filtration(c: CoverFiltration, v: Sequence[int]) -> Filtration:
    """``U_v`` with birth the latest birth over the elements in ``v``."""
    v = index_set(v)
    els = [c.elements[i] for i in v]
    births = {}
    for s, b in els[0].items():
        for el in els[1:]:
            bb = el.get(s)
            if bb is None:
                break
            b = max(b, bb)
        else:
            births[s] = b
    return Filtration(births, check=False)


def _first_nonempty(c: CoverFiltration, v: IndexSet) -> float:
    best = INF
    els = [c.elements[i] for i in v]
    for s, b in els[0].items():
        if len(s) != 1:
            continue
        for el in els[1:]:
            bb = el.get(s)
            if bb is None:
                break
            b = max(b, bb)
        else:
            best = min(best, b)
    return best


def nerve_filtration(c: CoverFiltration, max_card: int | None = None) -> Filtration:
    """Index set ``v`` born at the first scale where ``U_v`` is nonempty."""
    max_card = len(c) if max_card is None else max_card
    if max_card > len(c):
        raise ValueError("max_card exceeds the number of cover elements")
    return Filtration({v: _first_nonempty(c, v) for v in c.index_sets if len(v) <= max_card}, check=False)


def critical_scales(c: CoverFiltration) -> list[float]:
    return sorted({b for el in c.elements for b in el.values()})


def flag_filtration(c: CoverFiltration, dim_cap: int) -> dict[Flag, float]:
    """Strictly decreasing chains ``v0 > v1 > ...`` of index sets, largest first."""
    nerve = nerve_filtration(c)
    flags: dict[Flag, float] = {}

    def extend(chain: Flag):
        flags[chain] = nerve[chain[0]]
        if len(chain) > dim_cap:
            return
        last = chain[-1]
        for k in range(1, len(last)):
            for sub in combinations(last, k):
                extend(chain + (sub,))

    for v in nerve:
        extend((v,))
    return flags


def flag_complex_filtration(c: CoverFiltration, dim_cap: int, augmented: bool = False) -> FilteredChainComplex:
    return FilteredChainComplex.build(flag_filtration(c, dim_cap), faces_of=faces, cap=dim_cap, augmented=augmented)


def flag_complex(c: CoverFiltration, alpha: float, dim_cap: int) -> FilteredChainComplex:
    return flag_complex_filtration(c, dim_cap).at(alpha)


def _blowup_faces(cell):
    tau, flag = cell
    return [(f, flag) for f in faces(tau)] + [(tau, g) for g in faces(flag)]


def _blowup_dim(cell):
    return len(cell[0]) + len(cell[1]) - 2


def blowup_births(c: CoverFiltration, dim_cap: int) -> dict:
    nerve = nerve_filtration(c)
    inter = {v: intersection_filtration(c, v) for v in nerve}
    births = {}
    for flag, fb in flag_filtration(c, dim_cap).items():
        q = len(flag) - 1
        for tau, tb in inter[flag[0]].items():
            if len(tau) - 1 + q <= dim_cap:
                births[(tau, flag)] = max(tb, fb)
    return births


def blowup_complex(c: CoverFiltration, dim_cap: int) -> FilteredChainComplex:
    """Cells ``tau (x) flag`` with ``tau`` in the deepest intersection ``U_{v0}``."""
    return FilteredChainComplex.build(blowup_births(c, dim_cap), faces_of=_blowup_faces,
                                      dim_of=_blowup_dim, cap=dim_cap)


def projection_b(blowup: FilteredChainComplex, space: FilteredChainComplex, dims: Iterable[int]) -> ChainMap:
    """Collapse onto the covered space: ``tau (x) flag -> tau`` for flag vertices."""
    return ChainMap.from_function(blowup, space, lambda cell: (cell[0],) if len(cell[1]) == 1 else (),
                                  dims, "b")


def projection_p(blowup: FilteredChainComplex, nerve: FilteredChainComplex, dims: Iterable[int]) -> ChainMap:
    """Collapse onto the flag complex: ``tau (x) flag -> flag`` for vertices ``tau``."""
    return ChainMap.from_function(blowup, nerve, lambda cell: (cell[1],) if len(cell[0]) == 1 else (),
                                  dims, "p")


@dataclass(eq=False)
class CoverComplexes:
    """Filtered complexes of one cover, built once up to a dimension cap."""

    cover: CoverFiltration
    cap: int
    _inter: dict = field(default_factory=dict, repr=False)

    @cached_property
    def space(self) -> FilteredChainComplex:
        return self.cover.union.chain_complex(cap=self.cap)

    @cached_property
    def nerve(self) -> FilteredChainComplex:
        return nerve_filtration(self.cover).chain_complex(cap=self.cap)

    @cached_property
    def flag(self) -> FilteredChainComplex:
        return flag_complex_filtration(self.cover, self.cap)

    @cached_property
    def blowup(self) -> FilteredChainComplex:
        return blowup_complex(self.cover, self.cap)

    @cached_property
    def nerve_births(self) -> Filtration:
        return nerve_filtration(self.cover)

    def intersection(self, v: Sequence[int], augmented: bool = False) -> FilteredChainComplex:
        key = (index_set(v), augmented)
        if key not in self._inter:
            self._inter[key] = intersection_filtration(self.cover, key[0]).chain_complex(cap=self.cap, augmented=augmented)
        return self._inter[key]
