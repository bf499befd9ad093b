"""Acceptance gate.  Each test carries a ``criterion`` marker; a summary line
per criterion is printed at the end of the run (see conftest)."""

import time

import numpy as np
import pytest

from gpnt.complexes import INF, verify_chain_homotopy
from gpnt.cover import CoverComplexes, critical_scales
from gpnt.generators import gen_e1, gen_random, gen_tight
from gpnt.interleaving import Interleaving, InterleavingConfig, verify_gpnt_identities
from gpnt.metrics import bottleneck, bound_check
from gpnt.persistence import betti, goodness, persistence

from test_metrics import brute_bottleneck, random_diagram

GOOD_SEEDS = range(60)
PERTURBED_SEEDS = range(50)
CLOSING_SEEDS = range(20)


def fixtures():
    out = [(f"tight{n}", gen_tight(n)) for n in (1, 2, 3)] + [("e1", gen_e1())]
    out += [(f"good{s}", gen_random(s, "good")) for s in GOOD_SEEDS]
    out += [(f"perturbed{s}", gen_random(s, "perturbed")) for s in PERTURBED_SEEDS]
    out += [(f"closing{s}", gen_random(s, "closing")) for s in CLOSING_SEEDS]
    return out


@pytest.fixture(scope="module")
def bound_reports():
    """Bound reports for every fixture and K <= 2, with the wall time it took."""
    t0 = time.perf_counter()
    reports = {}
    for name, c in fixtures():
        cc = CoverComplexes(c, 3)
        for K in range(3):
            reports[name, K] = bound_check(cc, K, strict=False)
    return reports, time.perf_counter() - t0


@pytest.mark.criterion(1, "tight example: critical scales and bars (0,2n+2) / (0,n+1)")
@pytest.mark.parametrize("n", [1, 2, 3])
def test_criterion1_tight_example(n, record_property):
    t0 = time.perf_counter()
    c = gen_tight(n)
    assert critical_scales(c) == [0.0] + [float(s) for s in range(n + 1, 2 * n + 3)]
    cc = CoverComplexes(c, n + 1)
    space = persistence(cc.space, reduced=True)
    nerve = persistence(cc.nerve, reduced=True)
    top = max(space.dims)
    assert (top, 0.0, 2.0 * n + 2) in space.bars
    assert (top, 0.0, n + 1.0) in nerve.bars
    eps = goodness(cc, n).epsilon_star
    elapsed = time.perf_counter() - t0
    assert elapsed < 5
    record_property("detail", f"n={n}: nominal eps=1, dim={n}; computed eps*={eps:g}, dim={top}; "
                              f"space bar (0,{2 * n + 2}), nerve bar (0,{n + 1}); {elapsed:.2f}s")


@pytest.mark.criterion(2, "bottleneck bound d_B <= (K+1) eps* for K <= 2")
def test_criterion2_theorem_inequality(bound_reports, record_property):
    reports, elapsed = bound_reports
    names = {name for name, _ in reports}
    assert sum(1 for n in names if n.startswith(("good", "perturbed"))) >= 100
    checked = 0
    for (name, K), r in reports.items():
        if r.epsilon_star < INF:
            assert r.dB <= (K + 1) * r.epsilon_star, (name, K, r.dB, r.epsilon_star)
            checked += 1
    assert elapsed < 60
    record_property("detail", f"{checked} (cover, K) pairs with finite eps*, {len(names)} covers, {elapsed:.1f}s")


@pytest.mark.criterion(3, "good covers: eps* = 0 and equal diagrams")
def test_criterion3_good_covers(record_property):
    n = 0
    for s in GOOD_SEEDS:
        c = gen_random(s, "good")
        assert goodness(c, 2).epsilon_star == 0
        cc = CoverComplexes(c, 3)
        for k in range(3):
            assert persistence(cc.space).restrict([k]) == persistence(cc.nerve).restrict([k])
        n += 1
    assert n >= 50
    record_property("detail", f"{n} seeded good covers")


def _identity_covers():
    out = [("e1", gen_e1()), ("tight1", gen_tight(1)), ("tight2", gen_tight(2))]
    for flavor in ("perturbed", "closing"):
        for s in range(12):
            c = gen_random(s, flavor)
            if 0 < goodness(c, 1).epsilon_star < INF:
                out.append((f"{flavor}{s}", c))
    return out


@pytest.mark.criterion(4, "constructive identities at every grid scale; corruption detected")
def test_criterion4_identity_suite(record_property):
    covers = _identity_covers()
    assert len(covers) >= 21
    rng = np.random.default_rng(7)
    scales = flips = 0
    for name, c in covers:
        eps = goodness(c, 1).epsilon_star
        cfg = InterleavingConfig(1, eps)
        rep = verify_gpnt_identities(c, cfg)
        assert rep.ok, (name, [f.to_dict() for s in rep.per_scale for f in s.failures()], rep.failure)
        scales += len(rep.per_scale)
        il = Interleaving(c, cfg)
        for alpha in critical_scales(c):
            ch, ib, a = il.global_homotopy(alpha), il.ib_map(alpha), il.a_map(alpha)
            entries = [(k, r, j) for k, m in ch.matrices.items() for j in range(m.cols) for r in range(m.rows)]
            if name != "e1" and len(entries) > 25:  # exhaustive on E1, sampled elsewhere
                entries = [entries[i] for i in rng.choice(len(entries), 25, replace=False)]
            for k, r, j in entries:
                assert not verify_chain_homotopy(ch.flip(k, r, j), ib, a)
                flips += 1
    record_property("detail", f"{len(covers)} covers, {scales} grid scales, {flips} single-entry corruptions caught")


@pytest.mark.criterion(5, "blow-up faithfulness Dgm_k(B) = Dgm_k(W)")
def test_criterion5_blowup(bound_reports, record_property):
    reports, _ = bound_reports
    bad = [(name, K) for (name, K), r in reports.items() if not r.blowup_agrees]
    assert not bad
    record_property("detail", f"{len(reports)} (cover, K) pairs")


@pytest.mark.criterion(6, "half-shift bound and shifted-diagram translation")
def test_criterion6_half_shift(bound_reports, record_property):
    reports, _ = bound_reports
    n = 0
    for (name, K), r in reports.items():
        if r.epsilon_star == INF:
            continue
        t = (K + 1) * r.epsilon_star
        assert r.shifted_dB <= t / 2, (name, K)
        shifted = r.diagrams["shiftedNerve"].bars
        assert shifted == tuple((d, b + t / 2, e + t / 2) for d, b, e in r.diagrams["nerve"].bars)
        n += 1
    record_property("detail", f"{n} (cover, K) pairs")


@pytest.mark.criterion(7, "bottleneck matches the all-matchings oracle; metric axioms")
def test_criterion7_bottleneck(record_property):
    rng = np.random.default_rng(11)
    pairs = 0
    for _ in range(200):
        a, b, c = random_diagram(rng), random_diagram(rng), random_diagram(rng, essential=False)
        assert bottleneck(a, b) == brute_bottleneck(a, b)
        assert bottleneck(a, b) == bottleneck(b, a)
        assert bottleneck(a, a) == 0
        ab = bottleneck(a, b)
        if ab < INF:
            assert ab <= bottleneck(a, c) + bottleneck(c, b) or bottleneck(a, c) == INF
        assert (ab == 0) == (sorted(a) == sorted(b))
        pairs += 1
    record_property("detail", f"{pairs} seeded pairs")


@pytest.mark.criterion(8, "d^2 = 0, Euler/Betti and bar counts at every critical scale")
def test_criterion8_self_consistency(record_property):
    complexes = 0
    for name, c in fixtures():
        cc = CoverComplexes(c, 3)
        built = [cc.space, cc.nerve, cc.flag, cc.blowup] + [cc.intersection(v) for v in c.index_sets]
        for cx in built:
            assert cx.is_valid(), name
            dgm = persistence(cx)
            top = cx.cap - 1 if cx.truncated else cx.cap
            for a in critical_scales(c):
                sub = cx.at(a)
                b = [betti(sub, k) for k in range(top + 1)]
                assert [dgm.alive(k, a) for k in range(top + 1)] == b, (name, a)
                if not cx.truncated:
                    assert sub.euler_characteristic() == sum((-1) ** k * x for k, x in enumerate(b))
            complexes += 1
    record_property("detail", f"{complexes} filtered complexes")
