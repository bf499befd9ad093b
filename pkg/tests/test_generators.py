import pytest

from gpnt.complexes import Filtration
from gpnt.cover import critical_scales, nerve_filtration
from gpnt.generators import FLAVORS, RandomParams, gen_random, gen_tight
from gpnt.io import emit_cover
from gpnt.persistence import goodness


def test_tight_n1_matches_formula(tight1):
    u0, u1 = (dict(e) for e in tight1.elements)
    assert u0 == {(1,): 0.0, (0,): 3.0, (0, 1): 4.0}
    assert u1 == {(0,): 0.0, (1,): 2.0, (0, 1): 4.0}


def _formula(n, i, alpha):
    """Facets present in element i at scale alpha, straight from the piecewise definition."""
    full = tuple(range(n + 1))
    facet = lambda k: tuple(x for x in full if x != k)
    if alpha >= 2 * n + 2:
        return {"full"}
    out = {facet(i)}
    if alpha >= n + 1:
        out |= {facet(k) for k in range(0, int(alpha) - n - 1 + 1)}
    return out


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_tight_piecewise(n):
    c = gen_tight(n)
    full = tuple(range(n + 1))
    assert critical_scales(c) == [0.0] + [float(s) for s in range(n + 1, 2 * n + 3)]
    for i, el in enumerate(c.elements):
        Filtration(el)  # closure-monotone
        for alpha in [x / 2 for x in range(0, 4 * n + 6)]:
            present = {s for s, b in el.items() if b <= alpha}
            expect = _formula(n, i, alpha)
            if expect == {"full"}:
                assert full in present
            else:
                tops = {s for s in present if len(s) == n}
                assert tops == expect and full not in present
    assert c.union[full] == 2 * n + 2
    assert nerve_filtration(c)[full] == n + 1


def test_tight_range():
    with pytest.raises(ValueError):
        gen_tight(5)


def test_e1_shape(e1):
    assert e1.union.vertices() == [0, 1, 2, 3]
    assert set(e1.elements[1].values()) == {0.0}


@pytest.mark.parametrize("seed", range(10))
def test_good_flavor_is_good(seed):
    assert goodness(gen_random(seed, "good"), 2).epsilon_star == 0


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("delay", [1, 2])
def test_perturbed_bounded_by_delay(seed, delay):
    eps = goodness(gen_random(seed, "perturbed", RandomParams(delay=delay)), 2).epsilon_star
    assert eps <= delay


@pytest.mark.parametrize("flavor", FLAVORS)
def test_deterministic(flavor):
    assert emit_cover(gen_random(9, flavor)) == emit_cover(gen_random(9, flavor))


def test_closing_flavor_finite():
    for s in range(10):
        assert goodness(gen_random(s, "closing"), 2).epsilon_star < float("inf")


def test_unknown_flavor():
    with pytest.raises(ValueError):
        gen_random(0, "wild")
