"""Fixture generators: the tight example, the worked E1 cover, and seeded random covers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .complexes import Filtration, all_faces, close_and_validate
from .cover import CoverFiltration


def gen_e1() -> CoverFiltration:
    """Square 0-1-2-3 covered by two elements that overlap in two arcs."""
    u0 = close_and_validate(
        [((0,), 0), ((1,), 0), ((2,), 0), ((0, 1), 0), ((1, 2), 0),
         ((3,), 1), ((2, 3), 1), ((0, 3), 1),
         ((0, 2), 2), ((0, 1, 2), 2), ((0, 2, 3), 2)]
    )
    u1 = close_and_validate([((0,), 0), ((2,), 0), ((3,), 0), ((2, 3), 0), ((0, 3), 0)])
    return CoverFiltration((u0, u1), ("U0", "U1"))


def gen_tight(n: int) -> CoverFiltration:
    """Facets of the standard ``n``-simplex, each element absorbing facet ``j``
    at scale ``n + 1 + j`` and the whole simplex at ``2n + 2``."""
    if not 1 <= n <= 4:
        raise ValueError("n must be between 1 and 4")
    full = tuple(range(n + 1))
    facets = [tuple(x for x in full if x != i) for i in full]
    elements = []
    for i in full:
        births: dict[tuple[int, ...], float] = {}
        # floor(alpha) - n - 1 >= k  <=>  alpha >= n + 1 + k
        entries = [(facets[i], 0.0)] + [(facets[k], float(n + 1 + k)) for k in full]
        for facet, b in entries:
            for s in all_faces(facet):
                if b < births.get(s, math.inf):
                    births[s] = b
        for s in all_faces(full):
            births.setdefault(s, float(2 * n + 2))
        elements.append(Filtration(births))
    return CoverFiltration(tuple(elements), tuple(f"U{i}" for i in full))


@dataclass(frozen=True)
class RandomParams:
    vertices: int = 8
    elements: int = 3
    scales: int = 4
    delay: int = 1
    fill: float = 0.5


FLAVORS = ("good", "perturbed", "closing")


def gen_random(seed: int, flavor: str = "good", params: RandomParams = RandomParams()) -> CoverFiltration:
    """Deterministic random cover.

    ``good``: growing subpaths of the path graph on ``vertices`` vertices;
    every nonempty intersection is a subpath.  ``perturbed``: the same with
    edge births in each element delayed by up to ``delay`` scale units.
    ``closing``: random subcomplexes of a simplex that all become the full
    simplex at the last scale, so every intersection ends contractible.
    """
    rng = np.random.default_rng(seed)
    if flavor in ("good", "perturbed"):
        els = _path_cover(rng, params)
        if flavor == "perturbed":
            els = [_delay_edges(rng, el, params.delay) for el in els]
    elif flavor == "closing":
        els = _closing_cover(rng, params)
    else:
        raise ValueError(f"unknown flavor {flavor!r}; expected one of {FLAVORS}")
    return CoverFiltration(tuple(Filtration(b) for b in els), tuple(f"U{i}" for i in range(len(els))))


def _path_cover(rng, p: RandomParams) -> list[dict]:
    nv = p.vertices
    els = []
    for _ in range(p.elements):
        lo = hi = int(rng.integers(0, nv))
        start = int(rng.integers(0, max(1, p.scales // 2)))
        births = {(lo,): float(start)}
        for s in range(start + 1, p.scales + 1):
            if rng.random() < p.fill and lo > 0:
                lo -= 1
                births[(lo,)] = births[(lo, lo + 1)] = float(s)
            if rng.random() < p.fill and hi < nv - 1:
                hi += 1
                births[(hi,)] = births[(hi - 1, hi)] = float(s)
        els.append(births)
    return els


def _delay_edges(rng, births: dict, delay: int) -> dict:
    out = dict(births)
    for s in sorted(births):
        if len(s) == 2:
            out[s] = births[s] + float(rng.integers(0, delay + 1))
    return out


def _closing_cover(rng, p: RandomParams) -> list[dict]:
    nv = min(p.vertices, 6)
    full = tuple(range(nv))
    last = float(p.scales)
    maximal = [s for k in (2, 3) for s in combinations(full, k)]
    els = []
    for _ in range(p.elements):
        births: dict = {}
        for top in maximal:
            if rng.random() < p.fill:
                b = float(rng.integers(0, p.scales))
                for f in all_faces(top):
                    if b < births.get(f, math.inf):
                        births[f] = b
        for f in all_faces(full):
            if len(f) <= 4:
                births.setdefault(f, last)
        els.append(births)
    return els
