"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line
with its runtime. Run with `pytest tests/test_acceptance.py -v -s`.

The half-line criterion's final clause (level exceeding 0.9 by m <= 30) is
implemented exactly as stated and fails: the schedule's ceiling at m = 30 is
1 - prod(1 - 1/(3k+1)) ~= 0.715, and the realized level is ~0.687. See
notes/decisions.md for the full analysis.
"""
import functools
import random
import time
from fractions import Fraction as F

from watertransport import dynamics, exact, halfline, reduction, search, stochastic
from watertransport.graphs import Graph, WaterProfile

from conftest import (
    complete_graph,
    line_graph,
    random_connected_graph,
    random_moves,
    random_profile,
)


def criterion(name: str, budget_seconds: float):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            t0 = time.monotonic()
            try:
                fn()
            except BaseException:
                elapsed = time.monotonic() - t0
                print(f"ACCEPTANCE {name}: FAIL ({elapsed:.1f}s, budget {budget_seconds:.0f}s)")
                raise
            elapsed = time.monotonic() - t0
            status = "PASS" if elapsed < budget_seconds else "PASS-OVER-BUDGET"
            print(f"ACCEPTANCE {name}: {status} ({elapsed:.1f}s, budget {budget_seconds:.0f}s)")
            assert elapsed < budget_seconds, f"runtime {elapsed:.1f}s over budget"

        return wrapper

    return deco


@criterion("duality-suite", 10)
def test_duality_suite():
    rng = random.Random(20260)
    for _ in range(500):
        g = random_connected_graph(rng, rng.randint(2, 8))
        p = random_profile(rng, g)
        seq = random_moves(rng, g, rng.randint(0, 12))
        v = rng.randrange(g.n)
        dual = dynamics.dual_sad(g, seq, v)
        assert dual.dot(p) == dynamics.apply_sequence(p, seq).levels[v]


@criterion("conservation-convexity", 5)
def test_conservation_and_convexity():
    rng = random.Random(20261)
    moves_done = 0
    while moves_done < 10_000:
        g = random_connected_graph(rng, rng.randint(2, 8))
        p = random_profile(rng, g)
        total = p.total()
        hi = max(p.levels)
        for move in random_moves(rng, g, 50):
            p = dynamics.apply_move(p, move)
            assert p.total() == total
            new_hi = max(p.levels)
            assert new_hi <= hi
            hi = new_hi
            moves_done += 1


@criterion("energy-drop", 1)
def test_energy_drop():
    # complete averages (and skips): the regime optimal sequences use, where
    # the stated drop 2*mu^2*(b-a)^2 is exact
    rng = random.Random(20262)
    g = Graph(2, [(0, 1)])
    for _ in range(1000):
        a = F(rng.randrange(0, 257), 256)
        b = F(rng.randrange(0, 257), 256)
        mu = F(1, 2) if rng.random() < 0.9 else F(0)
        p = WaterProfile(g, [a, b])
        q = dynamics.apply_move(p, dynamics.Move.single(0, 1, mu))
        drop = dynamics.energy_of(p, [0, 1]) - dynamics.energy_of(q, [0, 1])
        assert drop == 2 * mu**2 * (b - a) ** 2


@criterion("closed-form-cross-checks", 120)
def test_closed_form_cross_checks():
    rng = random.Random(20263)
    for n in range(2, 6):
        g = complete_graph(n)
        for _ in range(100):
            p = random_profile(rng, g)
            v = rng.randrange(n)
            res = search.search_kappa(g, p, v, search.SearchConfig(max_depth=max(n - 1, 1)))
            assert res.exhausted
            assert res.best_value == exact.kappa_complete(p, v).value
    for n in range(2, 7):
        g = line_graph(n)
        for _ in range(100):
            p = random_profile(rng, g)
            v = rng.randrange(n)
            res = search.search_kappa(g, p, v, search.SearchConfig(max_depth=3))
            if v in (0, n - 1):
                assert res.best_value == exact.kappa_line_endpoint(p, v).value
            assert res.best_value == exact.kappa_line_interior(p, v).value


@criterion("paper-values", 1)
def test_paper_values():
    # single edge with levels (0.2, 0.8): peak at the emptier end is the mean
    k2 = Graph(2, [(0, 1)])
    r = exact.kappa_complete(WaterProfile(k2, [F(1, 5), F(4, 5)]), 0)
    assert r.value == F(1, 2)

    # monotone three-vertex path: peak at the low end is the full mean and no
    # finite single-edge sequence attains it
    l3 = line_graph(3)
    for levels in ([F(0), F(1, 2), F(1)], [F(1, 4), F(1, 4), F(3, 4)], [F(0), F(1), F(1)]):
        r = exact.kappa_line_endpoint(WaterProfile(l3, levels), 0)
        assert r.value == sum(levels, F(0)) / 3
        assert r.attained is False

    # (1,0,1) middle: 3/4, strictly above the best animal average 2/3
    p = WaterProfile(l3, [F(1), F(0), F(1)])
    r = exact.kappa_line3_middle(p)
    assert r.value == F(3, 4)
    assert exact.gla(l3, p, 1).value == F(2, 3)

    # four-vertex path (1/5,1/5,1/5,1), third vertex: 3/5 with the two-block
    # weights (1/6,1/6,1/6,1/2)
    l4 = line_graph(4)
    r = exact.kappa_line_interior(WaterProfile(l4, [F(1, 5), F(1, 5), F(1, 5), F(1)]), 2)
    assert r.value == F(3, 5)
    assert r.sad_weights == (F(1, 6), F(1, 6), F(1, 6), F(1, 2))


@criterion("cdf-reproduction", 180)
def test_cdf_reproduction():
    n = 10**6
    seed = 20264
    samples = {}
    for name in ("k2_v1", "line3_v1", "line3_v2"):
        s = stochastic.sample_case_fast(name, n, seed)
        samples[name] = s
        ks = s.ks_distance(stochastic.cdf_oracle(name))
        assert ks < 0.005, (name, ks)
    rep = stochastic.dominance_check(samples["line3_v1"], samples["line3_v2"])
    assert rep.max_violation <= 0.005


@criterion("sad-property-suite", 30)
def test_sad_property_suite():
    # macros restricted to complete averages, the single-edge-realizable kind;
    # partial macros provably break path unimodality (see decisions ledger)
    rng = random.Random(20265)
    for _ in range(10_000):
        n = rng.randint(2, 12)
        g = line_graph(n)
        start = rng.randrange(n)
        moves = random_moves(rng, g, rng.randint(0, 15), full_macros_only=True)
        rep = dynamics.check_sad_properties(dynamics.evolve_sad(g, start, moves), g)
        assert rep.all_ok, rep.violations


@criterion("reduction", 300)
def test_reduction():
    f1 = reduction.parse_cnf("p cnf 1 1\n1 0\n")
    inst = reduction.build_comb(f1)
    assert inst.graph.n == 369 <= 1091
    moves, achieved = reduction.witness_schedule(inst, {1: True})
    assert achieved == F(7261, 3600) > 2
    for n in range(1, 11):
        fm = reduction.parse_cnf("".join("1 0\n" for _ in range(n)))
        rep = reduction.verify_bounds(reduction.build_comb(fm))
        assert all(c["ok"] for c in rep["checks"].values()), (n, rep)
    unsat = reduction.parse_cnf("1 0\n-1 0\n")
    probe = reduction.adversarial_probe(reduction.build_comb(unsat), budget_seconds=60)
    assert probe.best_value <= 2


@criterion("half-line-strategy", 30)
def test_half_line_strategy():
    spec = halfline.HalfLineSpec.affine(3, 0, 30, "1/20")
    g, profile, _ = halfline.build_half_line(spec)  # pendants at 1, line at 0
    res = halfline.half_line_schedule(spec, profile)
    achieved = [s.achieved for s in res.steps]
    assert len(achieved) == 30
    assert all(b > a for a, b in zip(achieved, achieved[1:])), "strictly increasing"
    for s in res.steps:
        assert s.residual <= s.residual_bound, "residual bound must hold exactly"
    # Stated criterion; unattainable for this strategy (ceiling ~0.715, see
    # the decisions ledger) and therefore expected to FAIL honestly.
    best = float(max(achieved))
    assert best > 0.9, f"level never exceeds 0.9: max achieved {best:.4f}"


@criterion("flatness-band", 60)
def test_flatness_band():
    rng = random.Random(20266)
    eps = F(1, 50)
    g, center, profiles = stochastic.rejection_sample_flat_profiles(41, eps, 100, seed=20266)
    lo, hi = F(1, 2) - 6 * eps, F(1, 2) + 6 * eps
    for p in profiles:
        cur = p
        for mv in random_moves(rng, g, 50):
            cur = dynamics.apply_move(cur, mv)
            assert lo <= cur.levels[center] <= hi
