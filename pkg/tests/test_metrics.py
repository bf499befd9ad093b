from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpnt.complexes import INF, close_and_validate
from gpnt.cover import CoverFiltration
from gpnt.generators import gen_e1, gen_tight
from gpnt.metrics import TheoremViolation, bottleneck, bound_check, shifted_bound_check
from gpnt.persistence import PersistenceDiagram


def brute_bottleneck(a, b):
    """Minimum over every partial matching, diagonal taking the rest."""
    fa = [p for p in a if p[1] != INF]
    fb = [p for p in b if p[1] != INF]
    ea = sorted(p[0] for p in a if p[1] == INF)
    eb = sorted(p[0] for p in b if p[1] == INF)
    if len(ea) != len(eb):
        return INF
    ess = min((max((abs(x - y) for x, y in zip(ea, perm)), default=0.0) for perm in permutations(eb)),
              default=0.0)
    # pad both sides with diagonal slots and try every assignment
    m, n = len(fa), len(fb)
    left = fa + [None] * n
    right = fb + [None] * m
    best = INF
    for perm in permutations(range(m + n)):
        cost = 0.0
        for i, j in enumerate(perm):
            p, q = left[i], right[j]
            if p is None and q is None:
                c = 0.0
            elif q is None:
                c = (p[1] - p[0]) / 2
            elif p is None:
                c = (q[1] - q[0]) / 2
            else:
                c = max(abs(p[0] - q[0]), abs(p[1] - q[1]))
            cost = max(cost, c)
            if cost >= best:
                break
        best = min(best, cost)
    return max(ess, best if m + n else 0.0)


def random_diagram(rng, essential=True):
    pts = []
    for _ in range(rng.integers(0, 5)):
        b = float(rng.integers(0, 8))
        if essential and rng.random() < 0.2:
            pts.append((b, INF))
        else:
            pts.append((b, b + float(rng.integers(1, 6))))
    return pts


def test_examples():
    assert bottleneck([(0, 2)], [(0, 2)]) == 0
    assert bottleneck([(0, 2)], []) == 1
    assert bottleneck([(0, 4)], [(0, 2)]) == 2
    assert bottleneck([], []) == 0
    assert bottleneck([(0, INF)], []) == INF
    assert bottleneck([(0, INF)], [(3, INF)]) == 3


def test_dimension_selection():
    d1 = PersistenceDiagram(((0, 0.0, 4.0), (1, 0.0, 2.0)))
    d2 = PersistenceDiagram(((0, 0.0, 4.0),))
    assert bottleneck(d1, d2, 0) == 0 and bottleneck(d1, d2, 1) == 1


def test_oracle_agreement_200_pairs():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        a, b = random_diagram(rng), random_diagram(rng)
        assert bottleneck(a, b) == brute_bottleneck(a, b)


pt = st.tuples(st.integers(0, 6), st.integers(1, 5)).map(lambda p: (float(p[0]), float(p[0] + p[1])))
dgm = st.lists(pt, max_size=4)


@settings(max_examples=80, deadline=None)
@given(dgm, dgm, dgm)
def test_metric_axioms(a, b, c):
    ab = bottleneck(a, b)
    assert ab == bottleneck(b, a)
    assert bottleneck(a, a) == 0
    assert ab <= bottleneck(a, c) + bottleneck(c, b)
    assert (ab == 0) == (sorted(a) == sorted(b))


def test_bound_e1():
    rep = bound_check(gen_e1(), 1)
    assert (rep.epsilon_star, rep.dB, rep.bound, rep.verdict) == (1.0, 1.0, 2.0, True)
    assert rep.blowup_agrees
    assert rep.diagrams["nerve"].bars == ()


def test_bound_good_cover():
    c = CoverFiltration((close_and_validate([((0, 1, 2), 0)]), close_and_validate([((2, 3), 1)])))
    for k in (0, 1):
        rep = bound_check(c, k)
        assert rep.epsilon_star == 0 and rep.dB == 0 and rep.shifted_dB == 0
        assert rep.diagrams["space"] == rep.diagrams["nerve"] == rep.diagrams["shiftedNerve"]


def test_tight_n1_reduced():
    rep = shifted_bound_check(gen_tight(1), 0, reduced=True)
    assert rep.diagrams["space"].bars == ((0, 0.0, 4.0),)
    assert rep.diagrams["nerve"].bars == ((0, 0.0, 2.0),)
    assert rep.dB == 2 and rep.verdict
    assert rep.diagrams["shiftedNerve"].bars == ((0, 1.0, 3.0),)
    assert rep.shifted_dB == 1 and rep.shifted_dB <= rep.shifted_bound


def test_shift_translation():
    assert PersistenceDiagram(((1, 0.0, 2.0),)).shift(1.0).bars == ((1, 1.0, 3.0),)


def test_violation_is_raised_for_a_wrong_epsilon():
    with pytest.raises(TheoremViolation):
        bound_check(gen_e1(), 1, epsilon_star=0.1)
    rep = bound_check(gen_e1(), 1, epsilon_star=0.1, strict=False)
    assert not rep.verdict


def test_shifted_needs_finite_eps():
    loop = close_and_validate([((0, 1), 0), ((1, 2), 0), ((0, 2), 0)])
    with pytest.raises(ValueError):
        shifted_bound_check(CoverFiltration((loop,)), 1)
