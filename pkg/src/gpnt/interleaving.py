"""Constructive interleaving between a covered space and the nerve.

Local homotopies ``c_v`` contract each intersection onto its basepoint.
They are solved once per cell against the reduction of the whole
intersection filtration.  Columns are in birth order, so the canonical
back-substitution solution only touches cells born by scale ``b`` whenever
a solution inside the sublevel complex at ``b`` exists.  A cell's homotopy
is therefore the same chain at every scale where it is valid, which is what
makes the staircase compositions agree across scales.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .complexes import (INF, Chain, ChainHomotopy, ChainMap, FilteredChainComplex, Verdict, chain_sum, lift,
                        lift_homotopy, verify_chain_homotopy, verify_chain_map)
from .cover import CoverComplexes, CoverFiltration, IndexSet, critical_scales, index_set, projection_b, projection_p
from .gf2 import NoSolution, ReductionResult, col_reduce
from .persistence import homology_basis, induced_on_homology

log = logging.getLogger(__name__)


class EmptyForever(ValueError):
    """The intersection ``U_v`` is empty at every scale."""


class NotEpsGood(ArithmeticError):
    """A reduced class of ``U_v^alpha`` survives to ``alpha + eps``."""

    def __init__(self, v: IndexSet, alpha: float, dim: int, cell=None):
        self.v, self.alpha, self.dim, self.cell = v, alpha, dim, cell
        super().__init__(f"cover is not eps-good at v={list(v)}, alpha={alpha:g}, dim {dim}")

    def to_dict(self) -> dict:
        return {"v": list(self.v), "alpha": self.alpha, "dim": self.dim}


@dataclass(frozen=True)
class InterleavingConfig:
    K: int
    epsilon: float
    scales: tuple[float, ...] = ()

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("K must be nonnegative")
        if not 0 <= self.epsilon < INF:
            raise ValueError(f"epsilon must be finite and nonnegative, got {self.epsilon}")

    @property
    def t(self) -> float:
        return (self.K + 1) * self.epsilon


@dataclass(frozen=True)
class Basepoint:
    vertex: int
    scale: float


def choose_basepoint(c: CoverFiltration, v: Sequence[int]) -> Basepoint:
    """Smallest vertex present in ``U_v`` at the first scale where it is nonempty."""
    v = index_set(v)
    verts = {s[0]: b for s, b in c.intersection(v).items() if len(s) == 1}
    if not verts:
        raise EmptyForever(f"U_{list(v)} is empty at every scale")
    first = min(verts.values())
    return Basepoint(min(x for x, b in verts.items() if b == first), first)


class BasepointTable(dict):
    """``v -> Basepoint`` for every eventually nonempty index set."""

    @classmethod
    def of(cls, c: CoverFiltration) -> "BasepointTable":
        return cls({v: choose_basepoint(c, v) for v in c.index_sets})


def constant_chain_map(source: FilteredChainComplex, target: FilteredChainComplex, x: int,
                       dims: Iterable[int]) -> ChainMap:
    """Every vertex to ``x``, higher simplices to zero."""
    return ChainMap.from_function(source, target, lambda s: ((x,),) if len(s) == 1 else (), dims, f"x{x}")


_UNSOLVABLE = (None, INF)


class LocalHomotopy:
    """Scale-coherent contraction of one intersection filtration onto its basepoint.

    ``entry(cell)`` returns the chain ``c(cell)`` together with the latest
    birth in its support.  The chain is a valid value of ``c_v^alpha`` on
    ``cell`` exactly when that birth is at most ``alpha + eps``.
    """

    def __init__(self, v: IndexSet, cx: FilteredChainComplex, base: int):
        self.v, self.cx, self.base = v, cx, base
        self._red: dict[int, ReductionResult] = {}
        self._memo: dict = {}

    def _reduction(self, k: int) -> ReductionResult:
        if k not in self._red:
            self._red[k] = col_reduce(self.cx.boundary(k))
        return self._red[k]

    def entry(self, cell) -> tuple[Chain | None, float]:
        hit = self._memo.get(cell)
        if hit is None:
            hit = self._memo[cell] = self._compute(cell)
        return hit

    def _compute(self, cell):
        cx = self.cx
        k = cx.dim_of(cell)
        if k + 1 > cx.cap:
            raise ValueError(f"U_{list(self.v)} was built without dimension {k + 1}")
        # z = i(cell) + x_v(cell) + c(d cell), a cycle whenever the lower c are valid
        parts = [{cell}]
        if k == 0:
            parts.append({(self.base,)})
        for f in cx.faces(cell):
            sub, _ = self.entry(f)
            if sub is None:
                return _UNSOLVABLE
            parts.append(sub)
        z = chain_sum(parts)
        if not z:
            return frozenset(), -INF
        try:
            x = self._reduction(k + 1).solve(cx.vector(k, z))
        except NoSolution:
            return _UNSOLVABLE
        b = cx.chain(k + 1, x)
        return b, cx.chain_birth(b)

    def apply(self, chain: Iterable, alpha: float, eps: float) -> Chain:
        """``c_v^alpha`` on a chain of ``U_v^alpha``; raises NotEpsGood past ``alpha + eps``."""
        out: set = set()
        for cell in chain:
            b, birth = self.entry(cell)
            if birth > alpha + eps:
                raise NotEpsGood(self.v, alpha, self.cx.dim_of(cell), cell)
            out ^= b
        return frozenset(out)

    def homotopy(self, alpha: float, eps: float, K: int) -> ChainHomotopy:
        """``c_v^alpha`` as matrices from ``C(U_v^alpha)`` to ``C(U_v^{alpha+eps})`` in dims ``<= K``."""
        src, tgt = self.cx.at(alpha), self.cx.at(alpha + eps)
        for k in range(K + 1):
            for cell in src.basis(k):
                self.apply((cell,), alpha, eps)
        return ChainHomotopy.from_function(src, tgt, lambda cell: self.entry(cell)[0], range(K + 1),
                                           f"c_{list(self.v)}")


@dataclass(frozen=True)
class CheckResult:
    name: str
    verdict: Verdict

    def to_dict(self) -> dict:
        v = self.verdict
        out = {"check": self.name, "pass": v.ok}
        if not v.ok:
            out.update(dim=v.dim, cell=_cell_repr(v.cell), message=v.message)
        return out


def _cell_repr(cell):
    if isinstance(cell, tuple):
        return [_cell_repr(x) for x in cell]
    return cell


@dataclass
class ScaleReport:
    alpha: float
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.verdict.ok for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.verdict.ok]

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "pass": self.ok, "checks": [c.to_dict() for c in self.checks]}


@dataclass
class IdentityReport:
    K: int
    epsilon: float
    per_scale: list[ScaleReport] = field(default_factory=list)
    failure: NotEpsGood | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None and all(s.ok for s in self.per_scale)

    def to_dict(self) -> dict:
        out = {"K": self.K, "epsilon": self.epsilon, "t": (self.K + 1) * self.epsilon, "pass": self.ok,
               "scales": [s.to_dict() for s in self.per_scale]}
        if self.failure is not None:
            out["notEpsGood"] = self.failure.to_dict()
        return out


class Interleaving:
    """All maps of the construction for one cover and one configuration."""

    def __init__(self, cover: CoverFiltration, cfg: InterleavingConfig, complexes: CoverComplexes | None = None):
        self.cover, self.cfg = cover, cfg
        self.cc = complexes if complexes is not None and complexes.cap >= cfg.K + 1 else CoverComplexes(cover, cfg.K + 1)
        self.basepoints = BasepointTable.of(cover)
        self._local: dict[IndexSet, LocalHomotopy] = {}
        self._at: dict = {}

    @property
    def dims(self) -> range:
        return range(self.cfg.K + 1)

    def local(self, v: Sequence[int]) -> LocalHomotopy:
        v = index_set(v)
        if v not in self._local:
            cx = self.cc.intersection(v)
            self._local[v] = LocalHomotopy(v, cx, self.basepoints[v].vertex)
        return self._local[v]

    def _sub(self, which: str, alpha: float) -> FilteredChainComplex:
        key = (which, alpha)
        if key not in self._at:
            self._at[key] = getattr(self.cc, which).at(alpha)
        return self._at[key]

    def space(self, alpha):
        return self._sub("space", alpha)

    def flag(self, alpha):
        return self._sub("flag", alpha)

    def blowup(self, alpha):
        return self._sub("blowup", alpha)

    # -- local pieces ---------------------------------------------------------

    def local_homotopy(self, v: Sequence[int], alpha: float) -> ChainHomotopy:
        return self.local(v).homotopy(alpha, self.cfg.epsilon, self.cfg.K)

    def check_local(self, alpha: float) -> None:
        """Raise NotEpsGood for the first ``v`` (index-set order) whose ``c_v^alpha`` fails."""
        for v in self.cover.index_sets:
            if self.cc.nerve_births[v] <= alpha:
                self.local_homotopy(v, alpha)

    # -- the staircase --------------------------------------------------------

    def staircase(self, chain: Iterable, flag: Sequence[IndexSet], alpha: float) -> Chain:
        """``c_{v_q}^{alpha+q eps} ... c_{v_0}^{alpha}`` applied to a chain of ``U_{v_0}``."""
        eps = self.cfg.epsilon
        out = frozenset(chain)
        for j, v in enumerate(flag):
            out = self.local(v).apply(out, alpha + j * eps, eps)
        return out

    def global_image(self, cell, alpha: float) -> Chain:
        tau, flag = cell
        return self.staircase((tau,), flag, alpha)

    def q_image(self, sigma, alpha: float) -> Chain:
        x = (self.basepoints[sigma[0]].vertex,)
        if len(sigma) == 1:
            return frozenset((x,))
        return self.staircase((x,), sigma[1:], alpha)

    def a_image(self, cell, alpha: float) -> Chain:
        tau, sigma = cell
        return self.q_image(sigma, alpha) if len(tau) == 1 else frozenset()

    # -- matrices -------------------------------------------------------------

    def global_homotopy(self, alpha: float) -> ChainHomotopy:
        t = self.cfg.t
        return ChainHomotopy.from_function(self.blowup(alpha), self.space(alpha + t),
                                           lambda cell: self.global_image(cell, alpha), self.dims, "c")

    def q_map(self, alpha: float) -> ChainMap:
        return ChainMap.from_function(self.flag(alpha), self.space(alpha + self.cfg.t),
                                      lambda s: self.q_image(s, alpha), self.dims, "q")

    def a_map(self, alpha: float) -> ChainMap:
        return ChainMap.from_function(self.blowup(alpha), self.space(alpha + self.cfg.t),
                                      lambda cell: self.a_image(cell, alpha), self.dims, "a")

    def ib_map(self, alpha: float) -> ChainMap:
        """``i_W^{alpha, alpha+t} b^alpha``."""
        t = self.cfg.t
        b = projection_b(self.blowup(alpha), self.space(alpha), self.dims)
        return ChainMap.inclusion(self.space(alpha), self.space(alpha + t), self.dims, "iW").compose(b, "iW.b")

    def q_hat(self, alpha: float) -> ChainMap:
        return lift(self.q_map(alpha), self.blowup(alpha + self.cfg.t), point_source=True, name="q^")

    def p_map(self, alpha: float) -> ChainMap:
        return projection_p(self.blowup(alpha), self.flag(alpha), self.dims)

    def incl(self, which: str, alpha: float, beta: float) -> ChainMap:
        return ChainMap.inclusion(self._sub(which, alpha), self._sub(which, beta), self.dims, f"i{which[0].upper()}")

    # -- verification ---------------------------------------------------------

    def verify_at(self, alpha: float) -> ScaleReport:
        t = self.cfg.t
        self.check_local(alpha)
        self.check_local(alpha + t)
        rep = ScaleReport(alpha)
        add = lambda name, v: rep.checks.append(CheckResult(name, v))

        q = self.q_map(alpha)
        add("q-chain-map", verify_chain_map(q))

        c = self.global_homotopy(alpha)
        ib, a = self.ib_map(alpha), self.a_map(alpha)
        add("c-homotopy", verify_chain_homotopy(c, ib, a))

        iB = self.incl("blowup", alpha, alpha + t)
        add("lift-b", _equal_maps(lift(ib, self.blowup(alpha + t), name="b^"), iB))

        qh = self.q_hat(alpha)
        add("p-qhat", _equal_maps(self.p_map(alpha + t).compose(qh), self.incl("flag", alpha, alpha + t)))

        ch = lift_homotopy(c, self.blowup(alpha + t))
        ah = lift(a, self.blowup(alpha + t), name="a^")
        add("lifted-homotopy", verify_chain_homotopy(ch, iB, ah))

        add("homology", self._homology_identities(alpha))
        return rep

    def _homology_identities(self, alpha: float) -> Verdict:
        t = self.cfg.t
        a1, a2 = alpha + t, alpha + 2 * t
        p_iB = self.p_map(a1).compose(self.incl("blowup", alpha, a1))
        qh1 = self.q_hat(a1)
        iB2 = self.incl("blowup", alpha, a2)
        qh0 = self.q_hat(alpha)
        p_iB2 = self.p_map(a2).compose(self.incl("blowup", a1, a2))
        iN2 = self.incl("flag", alpha, a2)
        for k in self.dims:
            hb = {s: homology_basis(self.blowup(s), k) for s in (alpha, a1, a2)}
            hn = {s: homology_basis(self.flag(s), k) for s in (alpha, a1, a2)}
            lhs = induced_on_homology(qh1, k, hn[a1], hb[a2]) @ induced_on_homology(p_iB, k, hb[alpha], hn[a1])
            if lhs != induced_on_homology(iB2, k, hb[alpha], hb[a2]):
                return Verdict(False, k, None, "H(q^ p i_B) differs from H(i_B)")
            lhs = induced_on_homology(p_iB2, k, hb[a1], hn[a2]) @ induced_on_homology(qh0, k, hn[alpha], hb[a1])
            if lhs != induced_on_homology(iN2, k, hn[alpha], hn[a2]):
                return Verdict(False, k, None, "H(p i_B q^) differs from H(i_N)")
        return Verdict.passed()


def _equal_maps(f: ChainMap, g: ChainMap) -> Verdict:
    for k in sorted(set(f.matrices) | set(g.matrices)):
        if k not in f.matrices or k not in g.matrices:
            return Verdict(False, k, None, f"dimension {k} missing from a map")
        j = f.matrices[k].first_difference(g.matrices[k])
        if j is not None:
            return Verdict(False, k, f.source.basis(k)[j], f"{f.name} and {g.name} differ")
    return Verdict.passed()


def default_grid(cover: CoverFiltration, t: float) -> list[float]:
    crit = critical_scales(cover)
    return sorted({s + d for s in crit for d in (0.0, t, 2 * t)})


def verify_gpnt_identities(cover: CoverFiltration, cfg: InterleavingConfig,
                           complexes: CoverComplexes | None = None) -> IdentityReport:
    """Run every chain-level and homology-level check on the scale grid.

    The first NotEpsGood (ascending scale, then index-set order) stops the run
    and is recorded in the report.
    """
    il = Interleaving(cover, cfg, complexes)
    grid = sorted(cfg.scales) if cfg.scales else default_grid(cover, cfg.t)
    report = IdentityReport(cfg.K, cfg.epsilon)
    try:
        for alpha in grid:
            report.per_scale.append(il.verify_at(alpha))
            log.debug("alpha=%g ok=%s", alpha, report.per_scale[-1].ok)
    except NotEpsGood as exc:
        report.failure = exc
    return report
