"""Comb-graph instances encoding 3-CNF satisfiability as a water-transport
decision: the target level can pass 2 exactly when the formula is satisfiable.

Component sizes are polynomial in the clause count n: each variable gets a
tooth of 240 n^4 - 1 full barrels, each literal occurrence a connecting path
of 120 n^2 - 1 empty barrels, and the shaft alternates level-3 barrels with
empty clause barrels, ending in the empty target.
"""
from __future__ import annotations

import itertools
import time
from array import array
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dynamics import Move, apply_sequence
from .graphs import Graph, WaterProfile
from .search import SearchConfig

LEVEL0 = Fraction(0)
LEVEL1 = Fraction(1)
LEVEL2 = Fraction(2)
LEVEL3 = Fraction(3)
RESERVOIR_LEVEL = Fraction(7, 2)


class CnfError(ValueError):
    """Malformed formula: empty/oversized/tautological clause or bad literal."""


@dataclass(frozen=True)
class CnfFormula:
    """CNF with at most three distinct literals per clause."""

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.clauses)

    def variables(self) -> tuple[int, ...]:
        return tuple(sorted({abs(l) for c in self.clauses for l in c}))

    def satisfied_by(self, assignment: dict[int, bool]) -> bool:
        for clause in self.clauses:
            if not any(
                assignment.get(abs(l), False) == (l > 0) for l in clause
            ):
                return False
        return True


def parse_cnf(text: str) -> CnfFormula:
    """Parse DIMACS-style input; the header is optional.

    Duplicate literals inside a clause collapse; a clause containing both a
    variable and its negation is rejected as tautological.
    """
    declared_vars = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"bad problem line: {line!r}")
            declared_vars = int(parts[2])
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError as exc:
                raise CnfError(f"bad literal {tok!r}") from exc
            if lit == 0:
                if not current:
                    raise CnfError("empty clause")
                clause = tuple(sorted(set(current), key=abs))
                if len({abs(l) for l in clause}) != len(clause):
                    raise CnfError(f"tautological clause {current}")
                if len(clause) > 3:
                    raise CnfError(f"clause with more than 3 literals: {current}")
                clauses.append(clause)
                current = []
            else:
                current.append(lit)
    if current:
        raise CnfError("trailing clause without terminating 0")
    if not clauses:
        raise CnfError("formula has no clauses")
    max_var = max(abs(l) for c in clauses for l in c)
    if declared_vars is not None and max_var > declared_vars:
        raise CnfError(f"literal exceeds declared variable count {declared_vars}")
    return CnfFormula(num_vars=declared_vars or max_var, clauses=tuple(clauses))


def solve_brute_force(formula: CnfFormula, cap: int = 20) -> dict[int, bool] | None:
    """Convenience satisfiability check by enumeration, for few variables."""
    variables = formula.variables()
    if len(variables) > cap:
        raise ValueError(f"brute force capped at {cap} variables")
    for bits in itertools.product([False, True], repeat=len(variables)):
        assignment = dict(zip(variables, bits))
        if formula.satisfied_by(assignment):
            return assignment
    return None


# -- instance construction -------------------------------------------------------


@dataclass
class CombInstance:
    graph: Graph
    profile: WaterProfile
    formula: CnfFormula
    n: int  # clauses
    k: int  # variables appearing
    target: int
    shaft: tuple[int, ...]
    clause_vertices: tuple[int, ...]  # clause i -> vertex
    level3_vertices: tuple[int, ...]
    left_path: tuple[int, ...]
    link_nodes: tuple[int, ...]  # leftmost first, then interior links
    reservoir: int
    literal_ids: dict[tuple[int, bool], int]  # (variable, positive) -> vertex
    tooth_ranges: dict[int, range]  # variable -> ids, index 0 = lower end
    connector_ranges: dict[tuple[int, bool, int], range]  # (var, positive, clause) -> ids
    var_order: tuple[int, ...]  # original variable numbers, position = comb slot

    def role_of(self, u: int) -> str:
        if u == self.target:
            return "target"
        if u == self.reservoir:
            return "reservoir"
        if u in self.clause_vertices:
            return "clause"
        if u in self.level3_vertices:
            return "shaft-3"
        if u in self.left_path:
            return "path-2"
        if u in self.link_nodes:
            return "link"
        for (var, pos), lid in self.literal_ids.items():
            if u == lid:
                return "literal"
        for r in self.tooth_ranges.values():
            if u in r:
                return "tooth"
        return "connector"

    def role_map(self) -> dict:
        """Compact sidecar: roles by ranges and explicit id lists."""
        return {
            "n": self.n,
            "k": self.k,
            "target": self.graph.name_of(self.target),
            "reservoir": self.graph.name_of(self.reservoir),
            "clauses": [self.graph.name_of(u) for u in self.clause_vertices],
            "shaft": [self.graph.name_of(u) for u in self.shaft],
            "left_path": [self.graph.name_of(u) for u in self.left_path],
            "link_nodes": [self.graph.name_of(u) for u in self.link_nodes],
            "literals": {
                f"{'x' if pos else 'not_x'}{var}": self.graph.name_of(lid)
                for (var, pos), lid in sorted(self.literal_ids.items())
            },
            "teeth": {
                f"x{var}": [r.start, r.stop] for var, r in sorted(self.tooth_ranges.items())
            },
            "connectors": {
                f"{'x' if pos else 'not_x'}{var}->C{ci + 1}": [r.start, r.stop]
                for (var, pos, ci), r in sorted(self.connector_ranges.items())
            },
        }


def expected_vertex_count(n: int, k: int, occurrences: int) -> int:
    return 240 * k * n**4 + 120 * occurrences * n**2 + 2 * k - occurrences + 6 * n + 2


def build_comb(formula: CnfFormula, clause_order: Sequence[int] | None = None) -> CombInstance:
    """Materialize the comb instance for a formula.

    Clause vertices sit along the shaft in the given order (identity by
    default, i.e. C1 leftmost). Vertex ids are assigned in contiguous blocks
    so role lookups work by range even on large instances.
    """
    n = formula.n
    variables = formula.variables()
    k = len(variables)
    if clause_order is None:
        clause_order = tuple(range(n))
    else:
        clause_order = tuple(clause_order)
        if sorted(clause_order) != list(range(n)):
            raise ValueError("clause_order must be a permutation of range(n)")
    slot_of_var = {var: i for i, var in enumerate(variables)}
    tooth_len = 240 * n**4 - 1
    conn_len = 120 * n**2 - 1

    edges_x = array("l")
    edges_y = array("l")

    def add_edge(a: int, b: int) -> None:
        edges_x.append(a)
        edges_y.append(b)

    # shaft: positions 0..2n+1, left end level 3, clauses at odd positions
    shaft = tuple(range(2 * n + 2))
    for j in range(2 * n + 1):
        add_edge(j, j + 1)
    clause_vertices = [0] * n
    for pos, ci in enumerate(clause_order):
        clause_vertices[ci] = 2 * pos + 1
    clause_vertices = tuple(clause_vertices)
    level3 = tuple(j for j in range(2 * n + 1) if j % 2 == 0)
    target = 2 * n + 1

    next_id = 2 * n + 2
    left_path = tuple(range(next_id, next_id + 4 * n - 1))
    next_id += 4 * n - 1
    for a, b in zip(left_path, left_path[1:]):
        add_edge(a, b)
    add_edge(shaft[0], left_path[0])

    leftmost_link = next_id
    next_id += 1
    add_edge(left_path[-1], leftmost_link)
    interior_links = tuple(range(next_id, next_id + k - 1))
    next_id += k - 1
    link_nodes = (leftmost_link,) + interior_links

    literal_ids: dict[tuple[int, bool], int] = {}
    for var in variables:
        literal_ids[(var, True)] = next_id
        literal_ids[(var, False)] = next_id + 1
        next_id += 2
    reservoir = next_id
    next_id += 1

    first_var = variables[0]
    add_edge(leftmost_link, literal_ids[(first_var, True)])
    add_edge(leftmost_link, literal_ids[(first_var, False)])
    for i, link in enumerate(interior_links):
        va, vb = variables[i], variables[i + 1]
        add_edge(link, literal_ids[(va, True)])
        add_edge(link, literal_ids[(va, False)])
        add_edge(link, literal_ids[(vb, True)])
        add_edge(link, literal_ids[(vb, False)])
    last_var = variables[-1]
    add_edge(literal_ids[(last_var, True)], reservoir)
    add_edge(literal_ids[(last_var, False)], reservoir)

    tooth_ranges: dict[int, range] = {}
    for var in variables:
        r = range(next_id, next_id + tooth_len)
        tooth_ranges[var] = r
        next_id += tooth_len
        for a in range(r.start, r.stop - 1):
            add_edge(a, a + 1)
        add_edge(r.start, literal_ids[(var, True)])
        add_edge(r.start, literal_ids[(var, False)])

    connector_ranges: dict[tuple[int, bool, int], range] = {}
    for ci, clause in enumerate(formula.clauses):
        for lit in clause:
            var, pos = abs(lit), lit > 0
            r = range(next_id, next_id + conn_len)
            connector_ranges[(var, pos, ci)] = r
            next_id += conn_len
            for a in range(r.start, r.stop - 1):
                add_edge(a, a + 1)
            add_edge(r.start, literal_ids[(var, pos)])
            add_edge(r.stop - 1, clause_vertices[ci])

    total = next_id
    levels: list[Fraction] = [LEVEL0] * total
    for j in level3:
        levels[j] = LEVEL3
    for u in left_path:
        levels[u] = LEVEL2
    for u in link_nodes:
        levels[u] = LEVEL2
    for lid in literal_ids.values():
        levels[lid] = LEVEL2
    levels[reservoir] = RESERVOIR_LEVEL
    for r in tooth_ranges.values():
        for u in r:
            levels[u] = LEVEL1

    import numpy as np

    graph = Graph(total, (np.frombuffer(edges_x, dtype=np.int64), np.frombuffer(edges_y, dtype=np.int64)))
    profile = WaterProfile(graph, levels, capacity=RESERVOIR_LEVEL)
    return CombInstance(
        graph=graph,
        profile=profile,
        formula=formula,
        n=n,
        k=k,
        target=target,
        shaft=shaft,
        clause_vertices=clause_vertices,
        level3_vertices=level3,
        left_path=left_path,
        link_nodes=link_nodes,
        reservoir=reservoir,
        literal_ids=literal_ids,
        tooth_ranges=tooth_ranges,
        connector_ranges=connector_ranges,
        var_order=variables,
    )


# -- witness schedule -------------------------------------------------------------


class AssignmentError(ValueError):
    """Assignment does not satisfy the formula (or wrong probe mode)."""


def _phase1_trees(inst: CombInstance, assignment: dict[int, bool]) -> list[tuple[int, ...]]:
    """Vertex sets of the disjoint pooling trees, one per variable.

    Each tree is the tooth, its true literal, and the connectors plus clause
    barrels of the clauses assigned to that literal (lowest true variable
    wins a clause).
    """
    chosen: dict[int, list[int]] = {var: [] for var in inst.var_order}
    for ci, clause in enumerate(inst.formula.clauses):
        true_lits = [l for l in clause if assignment.get(abs(l), False) == (l > 0)]
        if not true_lits:
            raise AssignmentError(f"clause {ci + 1} unsatisfied")
        lit = min(true_lits, key=abs)
        chosen[abs(lit)].append(ci)
    trees = []
    for var in inst.var_order:
        pos = assignment.get(var, False)
        members: list[int] = list(inst.tooth_ranges[var])
        members.append(inst.literal_ids[(var, pos)])
        for ci in chosen[var]:
            members.extend(inst.connector_ranges[(var, pos, ci)])
            members.append(inst.clause_vertices[ci])
        trees.append(tuple(members))
    return trees


def _phase2_set(inst: CombInstance, assignment: dict[int, bool]) -> tuple[int, ...]:
    members: list[int] = list(inst.shaft)
    members.extend(inst.left_path)
    members.extend(inst.link_nodes)
    for var in inst.var_order:
        false_side = not assignment.get(var, False)
        members.append(inst.literal_ids[(var, false_side)])
    members.append(inst.reservoir)
    return tuple(members)


def witness_schedule(
    inst: CombInstance, assignment: dict[int, bool]
) -> tuple[list[Move], Fraction]:
    """Two-phase pooling schedule certifying satisfiability.

    Phase 1 pools each variable's star tree, filling every clause barrel
    strictly above 1 - 1/(2n); phase 2 pools the shaft, the left path, the
    linking path through the untouched false literals and the reservoir,
    lifting the target strictly above 2.
    """
    if not inst.formula.satisfied_by(assignment):
        raise AssignmentError("assignment does not satisfy the formula")
    g = inst.graph
    moves = [Move.macro_over(g, tree) for tree in _phase1_trees(inst, assignment)]
    moves.append(Move.macro_over(g, _phase2_set(inst, assignment)))
    final = apply_sequence(inst.profile, moves)
    return moves, final.levels[inst.target]


# -- structural bounds -------------------------------------------------------------


class CombBoundsError(AssertionError):
    """A structural bound failed; the builder produced a wrong instance."""


def verify_bounds(inst: CombInstance) -> dict:
    """Recompute the construction's counting arguments on the built instance."""
    n, k = inst.n, inst.k
    occurrences = sum(len(c) for c in inst.formula.clauses)
    report: dict = {"n": n, "k": k, "occurrences": occurrences, "checks": {}}

    def check(name: str, ok: bool, detail: str = "") -> None:
        report["checks"][name] = {"ok": bool(ok), "detail": detail}
        if not ok:
            raise CombBoundsError(f"{name}: {detail}")

    above1 = sum(
        (lv - 1 for lv in inst.profile.levels if lv > 1),
        Fraction(0),
    )
    formula_mass = (RESERVOIR_LEVEL - 1) + 3 * k + (4 * n - 1) + 2 * (n + 1)
    check(
        "water-above-1",
        above1 == formula_mass and above1 <= Fraction(15 * n) + Fraction(7, 2),
        f"{above1} vs formula {formula_mass}, cap {15 * n} + 7/2",
    )
    check("above-1-below-20n-1", above1 < 20 * n - 1, f"{above1} < {20 * n - 1}")
    lhs = 3 * Fraction(20 * n, 120 * n**2 + 1)
    check("tree-comparison", lhs <= Fraction(1, 2 * n), f"{lhs} <= 1/{2 * n}")
    check(
        "reduced-leaf-mass",
        1 + Fraction(15 * n, 120 * n**2) == 1 + Fraction(1, 8 * n),
        "identity 1 + 15n/120n^2 == 1 + 1/(8n)",
    )
    expected = expected_vertex_count(n, k, occurrences)
    cap = 720 * n**5 + 360 * n**3 + 9 * n + 2
    check(
        "vertex-count",
        inst.graph.n == expected and inst.graph.n <= cap,
        f"{inst.graph.n} == {expected} <= {cap}",
    )
    degree_cap = 5 if n == 1 else n + 3
    check("max-degree", inst.graph.max_degree() <= degree_cap, f"<= {degree_cap}")
    threshold = Fraction(12 * n + 4 * k + 4, 6 * n + 2 * k + 2)
    check("threshold-identity", threshold == 2, f"{threshold} == 2")
    check(
        "role-counts",
        len(inst.clause_vertices) == n
        and len(inst.tooth_ranges) == k
        and len(inst.literal_ids) == 2 * k
        and len(inst.link_nodes) == k,
        "n clauses, k teeth, 2k literals, k link nodes",
    )
    return report


# -- adversarial probe --------------------------------------------------------------


@dataclass
class ProbeResult:
    best_value: Fraction
    best_description: str
    attempts: int
    budget_exhausted: bool
    note: str = "heuristic evidence only; no optimality claim"


def adversarial_probe(
    inst: CombInstance,
    cfg: SearchConfig | None = None,
    budget_seconds: float = 60.0,
) -> ProbeResult:
    """Best target level found by role-informed schedules on an UNSAT instance.

    Tries every assignment's two-phase schedule (clauses without a true
    literal simply stay unfilled) plus phase-2-only and greedy variations.
    Levels should stay at or below 2; this is evidence, not a proof.
    """
    if solve_brute_force(inst.formula) is not None:
        raise AssignmentError("formula is satisfiable; probe expects an UNSAT instance")
    deadline = time.monotonic() + budget_seconds
    g = inst.graph
    best = inst.profile.levels[inst.target]
    best_desc = "initial level"
    attempts = 0
    exhausted_budget = False
    variables = inst.var_order
    for bits in itertools.product([False, True], repeat=len(variables)):
        if time.monotonic() > deadline:
            exhausted_budget = True
            break
        assignment = dict(zip(variables, bits))
        for use_phase1 in (True, False):
            attempts += 1
            moves = []
            if use_phase1:
                chosen: dict[int, list[int]] = {var: [] for var in variables}
                for ci, clause in enumerate(inst.formula.clauses):
                    true_lits = [
                        l for l in clause if assignment.get(abs(l), False) == (l > 0)
                    ]
                    if true_lits:
                        chosen[abs(min(true_lits, key=abs))].append(ci)
                for var in variables:
                    pos = assignment.get(var, False)
                    members = list(inst.tooth_ranges[var])
                    members.append(inst.literal_ids[(var, pos)])
                    for ci in chosen[var]:
                        members.extend(inst.connector_ranges[(var, pos, ci)])
                        members.append(inst.clause_vertices[ci])
                    moves.append(Move.macro_over(g, members))
            moves.append(Move.macro_over(g, _phase2_set(inst, assignment)))
            level = apply_sequence(inst.profile, moves).levels[inst.target]
            if level > best:
                best = level
                best_desc = (
                    f"assignment {assignment} {'with' if use_phase1 else 'without'} tree pooling"
                )
    # shaft-only pooling variants
    for m in range(1, inst.n + 1):
        attempts += 1
        members = inst.shaft[2 * (inst.n - m):]
        level = apply_sequence(inst.profile, [Move.macro_over(g, members)]).levels[inst.target]
        if level > best:
            best = level
            best_desc = f"shaft suffix of {len(members)} vertices"
    return ProbeResult(
        best_value=best,
        best_description=best_desc,
        attempts=attempts,
        budget_exhausted=exhausted_budget,
    )
