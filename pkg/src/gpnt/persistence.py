"""Persistence diagrams, induced ranks, homology maps and cover goodness."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .complexes import EMPTY, INF, ChainMap, FilteredChainComplex
from .cover import CoverComplexes, CoverFiltration, IndexSet
from .gf2 import Gf2Matrix, NoSolution, col_reduce, rank

Bar = tuple[int, float, float]


class RepresentativeNotCycle(RuntimeError):
    """A homology representative failed to map to a cycle."""


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of ``(dim, birth, death)`` bars; zero-length bars are omitted."""

    bars: tuple[Bar, ...] = ()

    def __post_init__(self):
        for d, b, e in self.bars:
            if not e > b:
                raise ValueError(f"bar ({b}, {e}) in dim {d} has nonpositive length")
        object.__setattr__(self, "bars", tuple(sorted(self.bars)))

    def __iter__(self) -> Iterator[Bar]:
        return iter(self.bars)

    def __len__(self):
        return len(self.bars)

    def dim(self, k: int) -> list[tuple[float, float]]:
        return [(b, e) for d, b, e in self.bars if d == k]

    def restrict(self, dims: Iterable[int]) -> "PersistenceDiagram":
        dims = set(dims)
        return PersistenceDiagram(tuple(bar for bar in self.bars if bar[0] in dims))

    def shift(self, delta: float) -> "PersistenceDiagram":
        return PersistenceDiagram(tuple((d, b + delta, e + delta) for d, b, e in self.bars))

    @property
    def dims(self) -> list[int]:
        return sorted({d for d, _, _ in self.bars})

    def alive(self, k: int, alpha: float) -> int:
        return sum(1 for d, b, e in self.bars if d == k and b <= alpha < e)

    def to_rows(self) -> list[dict]:
        return [{"dim": d, "birth": b, "death": e} for d, b, e in self.bars]


@dataclass(frozen=True, eq=False)
class Reduction:
    """Boundary reduction of a whole filtered complex in filtration order."""

    cells: tuple
    pairs: tuple[tuple[int, int], ...]
    essential: tuple[int, ...]


def reduce_filtration(c: FilteredChainComplex) -> Reduction:
    cells = c.cells()
    pos = {cell: i for i, cell in enumerate(cells)}
    columns = [[pos[f] for f in c.faces(cell)] for cell in cells]
    red = col_reduce(Gf2Matrix.from_columns(len(cells), columns))
    pairs = tuple(sorted((low, j) for low, j in red.pivots.items()))
    paired = {i for p in pairs for i in p}
    essential = tuple(j for j in red.zero_columns if j not in paired)
    return Reduction(tuple(cells), pairs, essential)


def persistence(c: FilteredChainComplex, reduced: bool = False) -> PersistenceDiagram:
    """Bars of the sublevel filtration of ``c``.

    With ``reduced`` the empty cell is adjoined at the first scale, which
    kills one essential class in dimension zero.  Bars in dimension ``cap``
    are dropped when cells above the cap were not materialised.
    """
    if reduced and not c.augmented:
        return persistence(_augment(c), reduced=True)
    red = reduce_filtration(c)
    cells = red.cells
    bars = []
    top = c.cap - 1 if c.truncated else c.cap
    for i, j in red.pairs:
        d = c.dim_of(cells[i]) if cells[i] is not EMPTY else -1
        b, e = c.birth(cells[i]), c.birth(cells[j])
        if 0 <= d <= top and e > b:
            bars.append((d, b, e))
    for i in red.essential:
        if cells[i] is EMPTY:
            continue
        d = c.dim_of(cells[i])
        if 0 <= d <= top:
            bars.append((d, c.birth(cells[i]), INF))
    return PersistenceDiagram(tuple(bars))


def _augment(c: FilteredChainComplex) -> FilteredChainComplex:
    births = {cell: c.birth(cell) for cell in c.cells() if cell is not EMPTY}
    out = FilteredChainComplex.build(births, faces_of=c.faces, dim_of=c.dim_of, cap=c.cap, augmented=True)
    out.truncated = c.truncated
    return out


def betti(c: FilteredChainComplex, k: int) -> int:
    """Betti number from ranks: ``dim C_k - rank d_k - rank d_{k+1}``."""
    return c.size(k) - rank(c.boundary(k)) - rank(c.boundary(k + 1))


def induced_rank(c: FilteredChainComplex | PersistenceDiagram, k: int, alpha: float, beta: float,
                 reduced: bool = False) -> int:
    """Rank of ``H_k(X^alpha -> X^beta)``: bars born by ``alpha`` still alive after ``beta``."""
    if alpha > beta:
        raise ValueError("need alpha <= beta")
    dgm = c if isinstance(c, PersistenceDiagram) else persistence(c, reduced=reduced)
    return sum(1 for d, b, e in dgm.bars if d == k and b <= alpha and e > beta)


# -- goodness ----------------------------------------------------------------


@dataclass(frozen=True)
class GoodnessReport:
    epsilon_star: float
    witnesses: tuple[tuple[IndexSet, int, float, float], ...]
    per_v: dict[IndexSet, float] = field(default_factory=dict)
    max_dim: int = 0

    def is_good(self, eps: float) -> bool:
        return eps >= self.epsilon_star

    def to_dict(self) -> dict:
        return {
            "epsilonStar": self.epsilon_star,
            "maxDim": self.max_dim,
            "witnesses": [{"v": list(v), "dim": d, "birth": b, "death": e} for v, d, b, e in self.witnesses],
            "perV": [{"v": list(v), "maxBar": m} for v, m in self.per_v.items()],
        }


def intersection_diagrams(c: CoverFiltration | CoverComplexes, max_dim: int,
                          threads: int = 1) -> dict[IndexSet, PersistenceDiagram]:
    cc = c if isinstance(c, CoverComplexes) else CoverComplexes(c, max_dim + 1)
    vs = cc.cover.index_sets

    def one(v):
        return persistence(cc.intersection(v, augmented=True), reduced=True).restrict(range(max_dim + 1))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            dgms = list(pool.map(one, vs))
    else:
        dgms = [one(v) for v in vs]
    return dict(zip(vs, dgms))


def goodness(c: CoverFiltration | CoverComplexes, max_dim: int, threads: int = 1) -> GoodnessReport:
    """Smallest ``eps`` for which every ``U_v^a -> U_v^{a+eps}`` kills reduced homology in dims ``<= max_dim``.

    Bars are half-open, so a bar of length exactly ``eps`` does not witness
    a failure.
    """
    per_v = {}
    lengths = []
    for v, dgm in intersection_diagrams(c, max_dim, threads).items():
        longest = max((e - b for _, b, e in dgm.bars), default=0.0)
        per_v[v] = longest
        lengths.extend((e - b, v, d, b, e) for d, b, e in dgm.bars)
    eps = max(per_v.values(), default=0.0)
    witnesses = tuple((v, d, b, e) for length, v, d, b, e in lengths if length == eps and eps > 0)
    return GoodnessReport(eps, witnesses, per_v, max_dim)


# -- homology bases and induced maps ----------------------------------------


@dataclass(frozen=True, eq=False)
class HomologyBasis:
    """Canonical cycle representatives for ``H_k`` of a single complex."""

    complex: FilteredChainComplex
    k: int
    representatives: tuple[tuple[int, ...], ...]
    _solver: object

    @property
    def rank(self) -> int:
        return len(self.representatives)

    def coordinates(self, cycle: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of a cycle (given by its support) in this basis."""
        nb = self._solver.basis_change.cols - self.rank
        try:
            x = self._solver.solve(cycle)
        except NoSolution:
            raise RepresentativeNotCycle(f"vector is not a {self.k}-cycle of the complex") from None
        return tuple(i - nb for i in x if i >= nb)


def homology_basis(c: FilteredChainComplex, k: int, reduced: bool = False) -> HomologyBasis:
    if reduced and not c.augmented:
        raise ValueError("reduced homology needs an augmented complex")
    if c.truncated and k >= c.cap:
        raise ValueError(f"dimension {k} needs cells of dimension {k + 1}; complex is capped at {c.cap}")
    dk = col_reduce(c.boundary(k))
    cycles = [dk.basis_change.columns[j] for j in dk.zero_columns]
    bounds = [col for col in col_reduce(c.boundary(k + 1)).reduced.columns if col]
    n = c.size(k)
    red = col_reduce(Gf2Matrix.from_columns(n, bounds + cycles))
    reps = tuple(cycles[j - len(bounds)] for j in range(len(bounds), len(bounds) + len(cycles))
                 if red.reduced.columns[j])
    solver = col_reduce(Gf2Matrix.from_columns(n, bounds + list(reps)))
    return HomologyBasis(c, k, reps, solver)


def induced_on_homology(f: ChainMap, k: int, source_basis: HomologyBasis | None = None,
                        target_basis: HomologyBasis | None = None) -> Gf2Matrix:
    """Matrix of ``H_k(f)`` in the canonical bases of source and target."""
    src = source_basis or homology_basis(f.source, k)
    tgt = target_basis or homology_basis(f.target, k)
    fk = f.matrices[k]
    cols = []
    for rep in src.representatives:
        image = fk.apply(rep)
        if f.target.boundary(k).apply(image):
            raise RepresentativeNotCycle(f"{f.name or 'map'} sends a {k}-cycle to a non-cycle")
        cols.append(tgt.coordinates(image))
    return Gf2Matrix.from_columns(tgt.rank, cols)
