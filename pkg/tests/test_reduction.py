from fractions import Fraction as F

import pytest

from watertransport.dynamics import apply_sequence
from watertransport.graphs import dump_instance
from watertransport.reduction import (
    AssignmentError,
    CnfError,
    CombBoundsError,
    CnfFormula,
    _phase1_trees,
    adversarial_probe,
    build_comb,
    expected_vertex_count,
    parse_cnf,
    solve_brute_force,
    verify_bounds,
    witness_schedule,
)

ONE_CLAUSE = "p cnf 1 1\n1 0\n"
UNSAT2 = "1 0\n-1 0\n"


# -- parsing -------------------------------------------------------------------


def test_parse_one_clause():
    f = parse_cnf(ONE_CLAUSE)
    assert f.num_vars == 1 and f.n == 1 and f.clauses == ((1,),)


def test_parse_without_header():
    f = parse_cnf("1 2 -3 0\n-1 -2 0\n")
    assert f.num_vars == 3 and f.n == 2


def test_parse_rejects_tautology():
    with pytest.raises(CnfError, match="tautological"):
        parse_cnf("1 -1 0\n")


def test_parse_rejects_wide_clause():
    with pytest.raises(CnfError, match="more than 3"):
        parse_cnf("1 2 3 4 0\n")


def test_parse_rejects_empty_clause():
    with pytest.raises(CnfError, match="empty clause"):
        parse_cnf("1 0\n0\n")


def test_parse_collapses_duplicate_literal():
    f = parse_cnf("2 2 0\n")
    assert f.clauses == ((2,),)


def test_brute_force_solver():
    assert solve_brute_force(parse_cnf(ONE_CLAUSE)) == {1: True}
    assert solve_brute_force(parse_cnf(UNSAT2)) is None
    sat = solve_brute_force(parse_cnf("1 2 0\n-1 2 0\n-2 3 0\n"))
    assert sat is not None and parse_cnf("1 2 0\n-1 2 0\n-2 3 0\n").satisfied_by(sat)


# -- builder -------------------------------------------------------------------


def test_build_one_clause_counts():
    inst = build_comb(parse_cnf(ONE_CLAUSE))
    # 239 tooth + 119 connector + 4 shaft + 3 left path + 1 link + 2 literals + 1 reservoir
    assert inst.graph.n == 369
    assert inst.graph.n == expected_vertex_count(1, 1, 1)
    assert inst.graph.n <= 720 + 360 + 9 + 2
    assert inst.n == 1 and inst.k == 1
    assert len(inst.clause_vertices) == 1
    assert len(inst.link_nodes) == 1
    assert len(inst.literal_ids) == 2
    assert inst.profile.levels[inst.reservoir] == F(7, 2)
    assert inst.profile.levels[inst.target] == 0


def test_role_counts_general():
    f = parse_cnf("1 2 3 0\n-1 4 5 0\n6 -2 0\n")
    inst = build_comb(f)
    assert inst.n == 3 and inst.k == 6
    assert len(inst.clause_vertices) == 3
    assert len(inst.tooth_ranges) == 6
    assert len(inst.literal_ids) == 12
    assert len(inst.link_nodes) == 6


def test_max_degree_bound():
    inst1 = build_comb(parse_cnf(ONE_CLAUSE))
    assert inst1.graph.max_degree() <= 5
    inst2 = build_comb(parse_cnf(UNSAT2))
    assert inst2.graph.max_degree() <= inst2.n + 3


def test_builder_deterministic_byte_for_byte():
    f = parse_cnf("1 2 0\n-2 3 0\n")
    a = build_comb(f)
    b = build_comb(f)
    assert dump_instance(a.graph, a.profile) == dump_instance(b.graph, b.profile)


def test_clause_order_configurable():
    f = parse_cnf("1 0\n2 0\n")
    default = build_comb(f)
    swapped = build_comb(f, clause_order=[1, 0])
    assert default.clause_vertices != swapped.clause_vertices
    verify_bounds(swapped)
    # the witness still certifies satisfiability under any clause layout
    _, achieved = witness_schedule(swapped, {1: True, 2: True})
    assert achieved > 2


def test_role_map_sidecar():
    inst = build_comb(parse_cnf(ONE_CLAUSE))
    roles = inst.role_map()
    assert roles["n"] == 1 and roles["k"] == 1
    assert roles["literals"]["x1"] != roles["literals"]["not_x1"]
    assert inst.role_of(inst.target) == "target"
    assert inst.role_of(inst.reservoir) == "reservoir"
    assert inst.role_of(inst.clause_vertices[0]) == "clause"
    assert inst.role_of(inst.tooth_ranges[1].start) == "tooth"


# -- witness schedule -----------------------------------------------------------


def test_witness_one_clause_exact_value():
    inst = build_comb(parse_cnf(ONE_CLAUSE))
    moves, achieved = witness_schedule(inst, {1: True})
    assert achieved == F(7261, 3600)
    assert achieved > 2
    assert len(moves) == 2  # one tree per variable, then the final pool


def test_witness_unsatisfying_assignment_rejected():
    inst = build_comb(parse_cnf(ONE_CLAUSE))
    with pytest.raises(AssignmentError):
        witness_schedule(inst, {1: False})


def test_clause_levels_after_phase_one():
    f = parse_cnf("1 2 0\n-1 3 0\n")
    inst = build_comb(f)
    assignment = solve_brute_force(f)
    moves, achieved = witness_schedule(inst, assignment)
    after1 = apply_sequence(inst.profile, moves[:-1])
    for cv in inst.clause_vertices:
        assert after1.levels[cv] > 1 - F(1, 2 * inst.n)
    assert achieved > 2


def test_phase1_trees_disjoint_and_linking_path_intact():
    f = parse_cnf("1 2 0\n-2 3 0\n")
    inst = build_comb(f)
    assignment = solve_brute_force(f)
    trees = _phase1_trees(inst, assignment)
    seen = set()
    for t in trees:
        assert not (seen & set(t))
        seen |= set(t)
    moves, _ = witness_schedule(inst, assignment)
    after1 = apply_sequence(inst.profile, moves[:-1])
    for var in inst.var_order:
        false_lit = inst.literal_ids[(var, not assignment.get(var, False))]
        assert after1.levels[false_lit] == 2
    for u in inst.link_nodes:
        assert after1.levels[u] == 2
    assert after1.levels[inst.reservoir] == F(7, 2)


def test_witness_every_satisfying_assignment(rng):
    """For small formulas every satisfying assignment certifies > 2."""
    import itertools

    f = parse_cnf("1 2 0\n-1 3 0\n")
    inst = build_comb(f)
    for bits in itertools.product([False, True], repeat=3):
        assignment = dict(zip((1, 2, 3), bits))
        if f.satisfied_by(assignment):
            _, achieved = witness_schedule(inst, assignment)
            assert achieved > 2


# -- structural bounds -----------------------------------------------------------


def test_verify_bounds_small_formulas():
    for text in (ONE_CLAUSE, UNSAT2, "1 2 3 0\n-1 4 5 0\n6 -2 0\n"):
        rep = verify_bounds(build_comb(parse_cnf(text)))
        assert all(c["ok"] for c in rep["checks"].values())


def test_water_above_one_example():
    inst = build_comb(parse_cnf(ONE_CLAUSE))
    rep = verify_bounds(inst)
    # 5/2 + 3 + 3 + 4 = 25/2 <= 15 + 7/2
    above = sum((lv - 1 for lv in inst.profile.levels if lv > 1), F(0))
    assert above == F(25, 2) <= F(37, 2)


def test_threshold_identity_k_independent():
    for n in range(1, 11):
        for k in (1, n, 3 * n):
            assert F(12 * n + 4 * k + 4, 6 * n + 2 * k + 2) == 2


def test_treecomp_inequality_examples():
    assert 3 * F(20 * 2, 120 * 4 + 1) <= F(1, 4)


def test_verify_bounds_catches_builder_bugs():
    inst = build_comb(parse_cnf(ONE_CLAUSE))
    levels = list(inst.profile.levels)
    levels[inst.reservoir] = F(0)  # sabotage
    inst.profile = inst.profile.with_levels(levels)
    with pytest.raises(CombBoundsError):
        verify_bounds(inst)


# -- adversarial probe ------------------------------------------------------------


def test_probe_unsat_stays_at_most_two():
    inst = build_comb(parse_cnf(UNSAT2))
    probe = adversarial_probe(inst, budget_seconds=60)
    assert probe.best_value <= 2
    assert probe.attempts > 0
    assert "evidence" in probe.note


def test_probe_rejects_satisfiable():
    inst = build_comb(parse_cnf(ONE_CLAUSE))
    with pytest.raises(AssignmentError):
        adversarial_probe(inst, budget_seconds=5)


def test_probe_below_convexity_bound():
    inst = build_comb(parse_cnf(UNSAT2))
    probe = adversarial_probe(inst, budget_seconds=30)
    assert probe.best_value <= F(7, 2)
