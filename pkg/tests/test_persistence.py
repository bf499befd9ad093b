import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpnt.complexes import INF, ChainMap, close_and_validate
from gpnt.cover import CoverComplexes, CoverFiltration, critical_scales
from gpnt.generators import gen_random, gen_tight
from gpnt.gf2 import Gf2Matrix
from gpnt.persistence import (PersistenceDiagram, betti, goodness, homology_basis, induced_on_homology,
                              induced_rank, intersection_diagrams, persistence)

from conftest import dense_rank


def _betti_oracle(c, k):
    dk = c.boundary(k).to_dense() if c.size(k - 1) else None
    rk = dense_rank(dk) if dk is not None and dk.size else 0
    dk1 = c.boundary(k + 1).to_dense() if c.size(k + 1) else None
    rk1 = dense_rank(dk1) if dk1 is not None and dk1.size else 0
    return c.size(k) - rk - rk1


def test_single_vertex():
    c = close_and_validate([((0,), 0)]).chain_complex()
    assert persistence(c).bars == ((0, 0.0, INF),)
    assert persistence(c, reduced=True).bars == ()


def test_e1_space(e1):
    assert persistence(e1.union.chain_complex()).dim(1) == [(0.0, 2.0)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_tight_space_and_nerve(n):
    cc = CoverComplexes(gen_tight(n), n + 1)
    assert persistence(cc.space, reduced=True).bars == ((n - 1, 0.0, 2.0 * n + 2),)
    assert persistence(cc.nerve, reduced=True).bars == ((n - 1, 0.0, n + 1.0),)


def test_induced_rank_examples(e1):
    u = CoverComplexes(e1, 2).intersection((0, 1), augmented=True)
    assert induced_rank(u, 0, 0, 0.5, reduced=True) == 1
    assert induced_rank(u, 0, 0, 1, reduced=True) == 0
    with pytest.raises(ValueError):
        induced_rank(u, 0, 1, 0)
    for a in (0, 1, 2):
        assert induced_rank(u, 0, a, a, reduced=True) == betti(u.at(a), 0)


def test_goodness_e1(e1):
    rep = goodness(e1, 1)
    assert rep.epsilon_star == 1.0
    assert ((0, 1), 0, 0.0, 1.0) in rep.witnesses
    assert ((0,), 1, 1.0, 2.0) in rep.witnesses
    assert rep.is_good(1.0) and not rep.is_good(0.999)


def test_goodness_good_cover():
    c = CoverFiltration((close_and_validate([((0, 1, 2), 0)]), close_and_validate([((1, 2, 3), 0)])))
    assert goodness(c, 2).epsilon_star == 0.0


def test_goodness_essential_cycle():
    loop = close_and_validate([((0, 1), 0), ((1, 2), 0), ((0, 2), 0)])
    assert goodness(CoverFiltration((loop,)), 1).epsilon_star == INF


def test_goodness_threads_match(e1):
    assert intersection_diagrams(e1, 1, threads=3) == intersection_diagrams(e1, 1)


def test_goodness_by_definition():
    c = gen_random(2, "perturbed")
    K = 1
    eps = goodness(c, K).epsilon_star
    cc = CoverComplexes(c, K + 1)
    scales = critical_scales(c)
    for v in c.index_sets:
        u = cc.intersection(v, augmented=True)
        dgm = persistence(u, reduced=True)
        for a in scales:
            for k in range(K + 1):
                assert induced_rank(dgm, k, a, a + eps) == 0
    if eps > 0:
        smaller = eps - 0.5
        assert any(induced_rank(persistence(cc.intersection(v, augmented=True), reduced=True), k, a, a + smaller)
                   for v in c.index_sets for a in scales for k in range(K + 1))


def test_induced_on_homology_identity(e1):
    W = e1.union.chain_complex(cap=2).at(0)
    i = ChainMap.inclusion(W, W, range(2))
    assert induced_on_homology(i, 1) == Gf2Matrix.identity(1)


def test_cycle_dies_in_filled_square(e1):
    W = e1.union.chain_complex(cap=2)
    i = ChainMap.inclusion(W.at(0), W.at(2), range(2))
    h = induced_on_homology(i, 1)
    assert h.shape == (0, 1)


def test_constant_map_kills_reduced_h0():
    two = close_and_validate([((0,), 0), ((1,), 0)]).chain_complex(cap=1, augmented=True)
    pt = close_and_validate([((0,), 0)]).chain_complex(cap=1, augmented=True)
    f = ChainMap.from_function(two, pt, lambda s: ((0,),) if s is not None else (None,), [-1, 0])
    src = homology_basis(two, 0, reduced=True)
    assert src.rank == 1
    h = induced_on_homology(f, 0, src, homology_basis(pt, 0, reduced=True))
    assert h.shape == (0, 1)


def test_homology_basis_rejects_top_of_truncated():
    c = close_and_validate([((0, 1, 2), 0)]).chain_complex(cap=1)
    with pytest.raises(ValueError):
        homology_basis(c, 1)


def test_diagram_rejects_zero_length():
    with pytest.raises(ValueError):
        PersistenceDiagram(((0, 1.0, 1.0),))


@pytest.mark.parametrize("make", [lambda: gen_tight(3), lambda: gen_random(7, "closing"),
                                  lambda: gen_random(11, "perturbed")])
def test_bars_match_betti_and_euler(make):
    c = make()
    cc = CoverComplexes(c, 4)
    for cx in (cc.space, cc.nerve, cc.flag, cc.blowup):
        dgm = persistence(cx)
        for a in critical_scales(c):
            sub = cx.at(a)
            for k in range(cx.cap if cx.truncated else cx.cap + 1):
                assert dgm.alive(k, a) == _betti_oracle(sub, k) == betti(sub, k)
            if not cx.truncated:
                assert sub.euler_characteristic() == sum((-1) ** k * betti(sub, k) for k in range(cx.cap + 1))


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(6)), st.integers(0, 50))
def test_diagram_independent_of_labels(perm, seed):
    c = gen_random(seed, "closing")
    f = c.union
    relabeled = {tuple(sorted(perm[x] for x in s)): b for s, b in f.items()}
    a = persistence(f.chain_complex())
    b = persistence(close_and_validate(relabeled.items()).chain_complex())
    assert a == b
