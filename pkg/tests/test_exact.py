import random
from fractions import Fraction as F

import pytest

from watertransport.dynamics import apply_sequence, dual_sad
from watertransport.exact import (
    EnumerationCapExceeded,
    WrongGraphClass,
    detect_class,
    gla,
    kappa_closed_form,
    kappa_complete,
    kappa_line3_middle,
    kappa_line_endpoint,
    kappa_line_interior,
)
from watertransport.graphs import Graph, WaterProfile

from conftest import complete_graph, line_graph, random_profile

L3 = line_graph(3)
K3 = complete_graph(3)


# -- greedy lattice animals -----------------------------------------------------


def test_gla_singleton_when_target_max():
    p = WaterProfile(L3, [F(0), F(1), F(0)])
    r = gla(L3, p, 1)
    assert r.subset == (1,) and r.value == 1 and r.witness is None


def test_gla_l3_all_three():
    p = WaterProfile(L3, [F(1), F(0), F(1)])
    r = gla(L3, p, 1)
    assert r.subset == (0, 1, 2) and r.value == F(2, 3)
    assert r.witness is not None and r.witness.is_macro


def test_gla_path5_derived():
    g = line_graph(5)
    p = WaterProfile(g, [F(0), F(1), F(2, 5), F(0), F(1)])
    r = gla(g, p, 2)
    assert r.subset == (1, 2) and r.value == F(7, 10)


def test_gla_greedy_lower_bound(rng):
    for _ in range(60):
        n = rng.randint(2, 8)
        g = line_graph(n)
        p = random_profile(rng, g)
        v = rng.randrange(n)
        exact = gla(g, p, v)
        greedy = gla(g, p, v, mode="greedy")
        assert greedy.value <= exact.value
        assert exact.value >= p.levels[v]


def test_gla_cap():
    g = line_graph(25)
    p = WaterProfile(g, [F(0)] * 25)
    with pytest.raises(EnumerationCapExceeded):
        gla(g, p, 0)
    gla(g, p, 0, cap=30)


def test_gla_witness_replay(rng):
    for _ in range(40):
        n = rng.randint(2, 7)
        g = complete_graph(n) if rng.random() < 0.5 else line_graph(n)
        p = random_profile(rng, g)
        v = rng.randrange(n)
        r = gla(g, p, v)
        if r.witness is not None:
            assert apply_sequence(p, [r.witness]).levels[v] == r.value


# -- complete graphs and star centers ----------------------------------------------


def test_complete_target_already_max():
    p = WaterProfile(K3, [F(1), F(0), F(1, 2)])
    r = kappa_complete(p, 0)
    assert r.value == 1 and r.certificate == () and r.attained


def test_complete_k3_derived():
    p = WaterProfile(K3, [F(1), F(1, 2), F(0)])
    r = kappa_complete(p, 2)
    assert r.value == F(5, 8)
    final, trace = apply_sequence(p, list(r.certificate), trace=True)
    assert [t.levels[2] for t in trace] == [F(1, 4), F(5, 8)]


def test_complete_k2_paper_value():
    g = Graph(2, [(0, 1)])
    p = WaterProfile(g, [F(1, 5), F(4, 5)])
    r = kappa_complete(p, 0)
    assert r.value == F(1, 2) and r.attained


def test_complete_tie_invariance():
    # equal levels commute: replaying the id-tie-broken certificate attains
    # the same value as visiting the tied vertices in the opposite order
    p = WaterProfile(K3, [F(1, 2), F(1, 2), F(0)])
    r = kappa_complete(p, 2)
    assert r.value == F(3, 8)
    assert apply_sequence(p, list(r.certificate)).levels[2] == F(3, 8)
    from watertransport.dynamics import Move

    other_order = [Move.single(2, 0), Move.single(2, 1)]
    assert apply_sequence(p, other_order).levels[2] == F(3, 8)


def test_star_center_equals_line3_middle(rng):
    for _ in range(50):
        p = random_profile(rng, L3)
        assert kappa_complete(p, 1).value == kappa_line3_middle(p).value


def test_complete_certificate_replay_random(rng):
    for n in range(2, 7):
        g = complete_graph(n)
        for _ in range(30):
            p = random_profile(rng, g)
            v = rng.randrange(n)
            r = kappa_complete(p, v)
            assert apply_sequence(p, list(r.certificate)).levels[v] == r.value
            assert dual_sad(g, list(r.certificate), v).weights == r.sad_weights


def test_complete_rejects_other_graphs():
    p = WaterProfile(L3, [F(0), F(1), F(0)])
    with pytest.raises(WrongGraphClass):
        kappa_complete(p, 0)  # end of a path is not a star center


# -- path endpoints ------------------------------------------------------------------


def test_endpoint_prefix_examples():
    p = WaterProfile(L3, [F(0), F(1), F(1)])
    r = kappa_line_endpoint(p, 0)
    assert r.value == F(2, 3) and not r.attained
    assert len(r.certificate) == 1 and r.certificate[0].is_macro

    g5 = line_graph(5)
    p5 = WaterProfile(g5, [F(1), F(0), F(0), F(0), F(0)])
    r5 = kappa_line_endpoint(p5, 0)
    assert r5.value == 1 and r5.certificate == () and r5.attained

    g4 = line_graph(4)
    p4 = WaterProfile(g4, [F(1, 10), F(9, 10), F(1, 2), F(9, 10)])
    r4 = kappa_line_endpoint(p4, 0)
    assert r4.value == F(3, 5) and not r4.attained


def test_endpoint_l2_attained_by_single_edge():
    # a two-vertex prefix average is reached by one pipe opening; the result
    # must agree with the complete-graph solver on the same instance
    g = Graph(2, [(0, 1)])
    p = WaterProfile(g, [F(1, 5), F(4, 5)])
    r = kappa_line_endpoint(p, 0)
    assert r.value == F(1, 2) and r.attained
    assert kappa_complete(p, 0).attained


def test_endpoint_nofin_never_attained(rng):
    """Monotone profiles with strict spread: best prefix is the full mean and
    no finite single-edge sequence reaches it."""
    for _ in range(50):
        vals = sorted(F(rng.randrange(0, 33), 32) for _ in range(3))
        if vals[0] == vals[2]:
            continue
        p = WaterProfile(L3, vals)
        r = kappa_line_endpoint(p, 0)
        assert r.value == sum(vals, F(0)) / 3
        assert not r.attained


def test_endpoint_macro_certificate_attains(rng):
    for _ in range(60):
        n = rng.randint(2, 8)
        g = line_graph(n)
        p = random_profile(rng, g)
        end = rng.choice([0, n - 1])
        r = kappa_line_endpoint(p, end)
        assert apply_sequence(p, list(r.certificate)).levels[end] == r.value


def test_endpoint_rejects_interior():
    p = WaterProfile(line_graph(4), [F(0)] * 4)
    with pytest.raises(WrongGraphClass):
        kappa_line_endpoint(p, 1)


# -- path interior -------------------------------------------------------------------


def test_interior_matches_endpoint_on_ends(rng):
    for n in range(2, 9):
        g = line_graph(n)
        for _ in range(25):
            p = random_profile(rng, g)
            for v in (0, n - 1):
                a, b = kappa_line_endpoint(p, v), kappa_line_interior(p, v)
                assert a.value == b.value and a.attained == b.attained


def test_interior_two_block_witness():
    g = line_graph(4)
    p = WaterProfile(g, [F(1, 5), F(1, 5), F(1, 5), F(1)])
    r = kappa_line_interior(p, 2)
    assert r.value == F(3, 5)
    assert r.sad_weights == (F(1, 6), F(1, 6), F(1, 6), F(1, 2))
    assert apply_sequence(p, list(r.certificate)).levels[2] == F(3, 5)
    # dual of the certificate realizes exactly the reported weight profile
    assert dual_sad(g, list(r.certificate), 2).weights == r.sad_weights


def test_interior_l3_middle_value():
    p = WaterProfile(L3, [F(1), F(0), F(1)])
    r = kappa_line_interior(p, 1)
    assert r.value == F(3, 4)
    assert apply_sequence(p, list(r.certificate)).levels[1] == F(3, 4)


def test_interior_equals_line3_solver(rng):
    for _ in range(80):
        p = random_profile(rng, L3)
        assert kappa_line_interior(p, 1).value == kappa_line3_middle(p).value


def test_interior_flags_when_plain_pooling_falls_short(rng):
    g = line_graph(4)
    # two-block optimum 2/3 strictly beats every flat segment (best 1/2)
    r = kappa_line_interior(WaterProfile(g, [F(1, 2), F(1, 2), F(0), F(1)]), 2)
    assert r.value == F(2, 3)
    assert r.gla_attains is False
    assert gla(g, WaterProfile(g, [F(1, 2), F(1, 2), F(0), F(1)]), 2).value == F(1, 2)
    # the reconstructed tie profile: the pair {v,q} is itself a best animal
    r2 = kappa_line_interior(WaterProfile(g, [F(1, 5), F(1, 5), F(1, 5), F(1)]), 2)
    assert r2.gla_attains is True
    # flag always agrees with comparing the exact animal value to the optimum
    for _ in range(40):
        n = rng.randint(2, 7)
        gg = line_graph(n)
        p = random_profile(rng, gg)
        v = rng.randrange(n)
        r3 = kappa_line_interior(p, v)
        assert r3.gla_attains == (gla(gg, p, v).value == r3.value)


def test_interior_certificate_replay_random(rng):
    for _ in range(80):
        n = rng.randint(2, 8)
        g = line_graph(n)
        p = random_profile(rng, g)
        v = rng.randrange(n)
        r = kappa_line_interior(p, v)
        assert apply_sequence(p, list(r.certificate)).levels[v] == r.value
        assert r.value >= gla(g, p, v).value


def test_line3_middle_examples():
    assert kappa_line3_middle(WaterProfile(L3, [F(0), F(1), F(0)])).value == 1
    assert kappa_line3_middle(WaterProfile(L3, [F(1), F(0), F(1)])).value == F(3, 4)
    assert kappa_line3_middle(WaterProfile(L3, [F(0), F(0), F(1)])).value == F(1, 2)


def test_line3_middle_attained_always(rng):
    # the middle of a three-vertex path always has a finite optimal sequence
    for _ in range(60):
        p = random_profile(rng, L3)
        r = kappa_line3_middle(p)
        assert r.attained
        assert apply_sequence(p, list(r.certificate)).levels[1] == r.value


# -- structure ------------------------------------------------------------------------


def test_monotone_under_edge_addition(rng):
    """kappa never decreases when an edge is added: compare the path with its
    completion on all 3-vertex instances."""
    for _ in range(60):
        levels = [F(rng.randrange(0, 17), 16) for _ in range(3)]
        for v in range(3):
            on_path = kappa_closed_form(WaterProfile(L3, levels), v).value
            on_k3 = kappa_complete(WaterProfile(K3, levels), v).value
            assert on_path <= on_k3


def test_detect_class():
    assert detect_class(K3, 0) == "complete"
    assert detect_class(Graph(4, [(0, 1), (0, 2), (0, 3)]), 0) == "star-center"
    assert detect_class(Graph(4, [(0, 1), (0, 2), (0, 3)]), 1) is None
    assert detect_class(line_graph(5), 0) == "line-endpoint"
    assert detect_class(line_graph(5), 2) == "line-interior"
    assert detect_class(L3, 1) == "star-center"  # star takes priority: finite certificate
    petersen_ish = Graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    assert detect_class(petersen_ish, 0) is None


def test_gla_lower_bounds_kappa(rng):
    for _ in range(60):
        n = rng.randint(2, 8)
        g = line_graph(n)
        p = random_profile(rng, g)
        v = rng.randrange(n)
        assert gla(g, p, v).value <= kappa_line_interior(p, v).value
