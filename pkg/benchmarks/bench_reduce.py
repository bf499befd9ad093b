"""Time boundary reduction on both kernel backends.

    python benchmarks/bench_reduce.py --points 60 120 --repeat 3

Builds the Rips-style flag complex of random points on a circle (edges
below a distance threshold, triangles whose edges are all present), then
reduces its filtration-ordered boundary matrix with numba and with numpy
and checks that both produce the same pivots.
"""

from __future__ import annotations

import argparse
import time
from itertools import combinations

import numpy as np

from gpnt import _kernels
from gpnt.complexes import FilteredChainComplex, faces
from gpnt.gf2 import Gf2Matrix, col_reduce


def circle_complex(n: int, radius: float, seed: int) -> FilteredChainComplex:
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * np.pi, n)
    pts = np.c_[np.cos(theta), np.sin(theta)] + rng.normal(0, 0.05, (n, 2))
    dist = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
    births = {(i,): 0.0 for i in range(n)}
    edges = {(i, j): float(dist[i, j]) for i, j in combinations(range(n), 2) if dist[i, j] <= radius}
    births.update(edges)
    for i, j, k in combinations(range(n), 3):
        if (i, j) in edges and (i, k) in edges and (j, k) in edges:
            births[(i, j, k)] = max(edges[(i, j)], edges[(i, k)], edges[(j, k)])
    return FilteredChainComplex.build(births, faces_of=faces)


def full_boundary(c: FilteredChainComplex) -> Gf2Matrix:
    cells = c.cells()
    pos = {cell: i for i, cell in enumerate(cells)}
    return Gf2Matrix.from_columns(len(cells), [[pos[f] for f in c.faces(x)] for x in cells])


def time_backend(name: str, m: Gf2Matrix, repeat: int) -> tuple[float, dict]:
    _kernels.set_backend(name)
    col_reduce(m)  # warm-up (compilation for numba)
    best, pivots = float("inf"), None
    for _ in range(repeat):
        fresh = Gf2Matrix(m.rows, m.cols, m.columns)  # drop cached packing
        t0 = time.perf_counter()
        pivots = col_reduce(fresh).pivots
        best = min(best, time.perf_counter() - t0)
    return best, pivots


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, nargs="+", default=[40, 80, 120])
    ap.add_argument("--radius", type=float, default=0.6)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    start = _kernels.backend()
    print(f"{'points':>7} {'cells':>8} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    try:
        for n in args.points:
            m = full_boundary(circle_complex(n, args.radius, args.seed))
            t_nb, p_nb = time_backend("numba", m, args.repeat)
            t_np, p_np = time_backend("numpy", m, args.repeat)
            if p_nb != p_np:
                raise SystemExit(f"backends disagree at {n} points")
            print(f"{n:>7} {m.cols:>8} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x")
    finally:
        _kernels.set_backend(start)


if __name__ == "__main__":
    main()
