"""Bottleneck distance and the nerve approximation bounds."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .complexes import INF
from .cover import CoverComplexes, CoverFiltration
from .persistence import PersistenceDiagram, goodness, persistence

Point = tuple[float, float]


class TheoremViolation(AssertionError):
    """A bound that must hold for every eps-good cover was observed to fail."""


def _points(d: PersistenceDiagram | Sequence[Point], k: int | None) -> list[Point]:
    if isinstance(d, PersistenceDiagram):
        return d.dim(k) if k is not None else [(b, e) for _, b, e in d.bars]
    return [(float(b), float(e)) for b, e in d]


def _perfect(m: int, n: int, pairs: np.ndarray, left_diag: np.ndarray, right_diag: np.ndarray) -> bool:
    """Perfect matching in the augmented graph.

    Rows are the ``m`` points of the first diagram followed by ``n`` diagonal
    slots; columns are the ``n`` points of the second followed by ``m``
    diagonal slots.  Diagonal slots always match each other.
    """
    size = m + n
    dense = np.zeros((size, size), dtype=bool)
    dense[:m, :n] = pairs
    dense[np.arange(m), n + np.arange(m)] = left_diag
    dense[m + np.arange(n), np.arange(n)] = right_diag
    dense[m:, n:] = True
    match = maximum_bipartite_matching(csr_matrix(dense), perm_type="column")
    return bool(np.all(match >= 0))


def _finite_bottleneck(a: list[Point], b: list[Point]) -> float:
    m, n = len(a), len(b)
    if m + n == 0:
        return 0.0
    A = np.array(a, dtype=float).reshape(m, 2)
    B = np.array(b, dtype=float).reshape(n, 2)
    cost = np.maximum(np.abs(A[:, None, 0] - B[None, :, 0]), np.abs(A[:, None, 1] - B[None, :, 1]))
    da = (A[:, 1] - A[:, 0]) / 2
    db = (B[:, 1] - B[:, 0]) / 2
    candidates = np.unique(np.concatenate([cost.ravel(), da, db, [0.0]]))
    lo, hi = 0, len(candidates) - 1
    # the largest candidate always admits a matching (everything to the diagonal)
    while lo < hi:
        mid = (lo + hi) // 2
        r = candidates[mid]
        if _perfect(m, n, cost <= r, da <= r, db <= r):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def bottleneck(d1: PersistenceDiagram | Sequence[Point], d2: PersistenceDiagram | Sequence[Point],
               k: int | None = None) -> float:
    """Bottleneck distance between the dimension-``k`` parts of two diagrams.

    Essential points (death ``inf``) are matched only to each other, by
    sorted birth; different counts give ``inf``.
    """
    p1, p2 = _points(d1, k), _points(d2, k)
    e1 = sorted(b for b, e in p1 if e == INF)
    e2 = sorted(b for b, e in p2 if e == INF)
    if len(e1) != len(e2):
        return INF
    ess = max((abs(x - y) for x, y in zip(e1, e2)), default=0.0)
    fin = _finite_bottleneck([p for p in p1 if p[1] != INF], [p for p in p2 if p[1] != INF])
    return max(ess, fin)


@dataclass
class BoundReport:
    K: int
    epsilon_star: float
    dB: float
    bound: float
    verdict: bool
    shifted_dB: float
    shifted_bound: float
    shifted_verdict: bool
    blowup_agrees: bool
    reduced: bool = False
    diagrams: dict[str, PersistenceDiagram] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict and self.shifted_verdict and self.blowup_agrees

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "reduced": self.reduced,
            "epsilonStar": self.epsilon_star,
            "dB": self.dB,
            "bound": self.bound,
            "verdict": self.verdict,
            "shiftedDB": self.shifted_dB,
            "shiftedBound": self.shifted_bound,
            "shiftedVerdict": self.shifted_verdict,
            "blowupAgrees": self.blowup_agrees,
            "diagrams": {name: d.to_rows() for name, d in self.diagrams.items()},
        }


def bound_check(c: CoverFiltration | CoverComplexes, K: int, reduced: bool = False,
                strict: bool = True, epsilon_star: float | None = None) -> BoundReport:
    """Compare dimension-``K`` diagrams of the space, the nerve, the flag complex and the blow-up.

    With ``strict`` a failed inequality (finite ``epsilon_star``) or a
    blow-up diagram different from the space diagram raises TheoremViolation.
    """
    cc = c if isinstance(c, CoverComplexes) and c.cap >= K + 1 else CoverComplexes(
        c.cover if isinstance(c, CoverComplexes) else c, K + 1)
    eps = goodness(cc, K).epsilon_star if epsilon_star is None else epsilon_star
    dims = [K]
    space = persistence(cc.space, reduced).restrict(dims)
    nerve = persistence(cc.nerve, reduced).restrict(dims)
    flag = persistence(cc.flag, reduced).restrict(dims)
    blow = persistence(cc.blowup, reduced).restrict(dims)
    if flag != nerve:
        raise TheoremViolation(f"flag complex and nerve diagrams differ in dim {K}")
    bound = (K + 1) * eps
    t = bound
    shifted = nerve.shift(t / 2) if t < INF else nerve
    dB = bottleneck(space, nerve, K)
    sdB = bottleneck(space, shifted, K)
    rep = BoundReport(
        K=K, epsilon_star=eps, dB=dB, bound=bound, verdict=dB <= bound,
        shifted_dB=sdB, shifted_bound=bound / 2, shifted_verdict=sdB <= bound / 2,
        blowup_agrees=blow == space, reduced=reduced,
        diagrams={"space": space, "nerve": nerve, "blowup": blow, "shiftedNerve": shifted},
    )
    if strict:
        if not rep.blowup_agrees:
            raise TheoremViolation(f"blow-up diagram differs from the space diagram in dim {K}")
        if eps < INF and not rep.verdict:
            raise TheoremViolation(f"d_B = {dB} exceeds (K+1) eps = {bound} in dim {K}")
        if eps < INF and not rep.shifted_verdict:
            raise TheoremViolation(f"shifted d_B = {sdB} exceeds {bound / 2} in dim {K}")
    return rep


def shifted_bound_check(c: CoverFiltration | CoverComplexes, K: int, reduced: bool = False) -> BoundReport:
    """Same report, requiring a finite ``epsilon_star`` for the half-shift."""
    rep = bound_check(c, K, reduced)
    if rep.epsilon_star == INF:
        raise ValueError("the shifted bound needs a finite epsilon_star")
    return rep


def bound_check_dims(c: CoverFiltration, dims: Iterable[int], reduced: bool = False,
                     strict: bool = True) -> list[BoundReport]:
    dims = sorted(set(dims))
    cc = CoverComplexes(c, max(dims) + 1)
    return [bound_check(cc, k, reduced, strict) for k in dims]
