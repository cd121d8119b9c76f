"""Averaging moves, their duals, energy tracking and weight-profile checks.

A move opens one pipe (edge) or a connected set of pipes simultaneously
(macro move) with mixing parameter mu in [0, 1/2]; mu = 1/2 is a complete
average. All arithmetic is exact rational.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graphs import Graph, WaterProfile
from .rationals import parse_rational

HALF = Fraction(1, 2)


class InvalidMoveError(ValueError):
    """Move is not applicable to the graph (missing edge, disconnected set)."""


@dataclass(frozen=True)
class Move:
    """Single-edge or macro averaging move with mixing parameter mu.

    For a single edge the incident pair is `vertices`; for a macro move
    `macro_edges` is a canonical connected edge set and `vertices` its
    incident set (at least 3 vertices).
    """

    mu: Fraction
    vertices: tuple[int, ...]
    macro_edges: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if not (0 <= self.mu <= HALF):
            raise InvalidMoveError(f"mu {self.mu} outside [0, 1/2]")

    @property
    def is_macro(self) -> bool:
        return self.macro_edges is not None

    @staticmethod
    def single(x: int, y: int, mu: Fraction = HALF) -> "Move":
        if x == y:
            raise InvalidMoveError("edge endpoints coincide")
        return Move(mu=Fraction(mu), vertices=(min(x, y), max(x, y)))

    @staticmethod
    def macro(edges: Iterable[tuple[int, int]], mu: Fraction = HALF) -> "Move":
        canon = tuple(sorted((min(x, y), max(x, y)) for x, y in edges))
        verts: set[int] = set()
        for x, y in canon:
            if x == y:
                raise InvalidMoveError("self-loop in macro edge set")
            verts.add(x)
            verts.add(y)
        if len(verts) < 3:
            raise InvalidMoveError("macro move needs at least 3 incident vertices")
        if not _edges_connect(canon, verts):
            raise InvalidMoveError("macro edge set does not connect its vertex set")
        return Move(mu=Fraction(mu), vertices=tuple(sorted(verts)), macro_edges=canon)

    @staticmethod
    def macro_over(graph: Graph, vertices: Iterable[int], mu: Fraction = HALF) -> "Move":
        """Macro move on a connected vertex set, using its canonical spanning edges."""
        vs = tuple(sorted(set(vertices)))
        if len(vs) == 2:
            return Move.single(vs[0], vs[1], mu)
        return Move.macro(graph.spanning_edges(vs), mu)


def _edges_connect(edges: Sequence[tuple[int, int]], verts: set[int]) -> bool:
    if not verts:
        return False
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for x, y in edges:
        adj[x].append(y)
        adj[y].append(x)
    start = next(iter(verts))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(verts)


def validate_move(graph: Graph, move: Move) -> None:
    """Check a move against a graph; raises InvalidMoveError if inapplicable."""
    if move.is_macro:
        for x, y in move.macro_edges:
            if not graph.has_edge(x, y):
                raise InvalidMoveError(f"macro edge ({x},{y}) not in graph")
        # connectivity and |A| >= 3 were checked at construction
    else:
        x, y = move.vertices
        if not graph.has_edge(x, y):
            raise InvalidMoveError(f"edge ({x},{y}) not in graph")


# -- applying moves -----------------------------------------------------------


def _apply_to_levels(levels: list[Fraction], move: Move) -> None:
    mu = move.mu
    if move.is_macro:
        members = move.vertices
        mean = sum((levels[u] for u in members), Fraction(0)) / len(members)
        one_minus = 1 - 2 * mu
        two_mu_mean = 2 * mu * mean
        for u in members:
            levels[u] = one_minus * levels[u] + two_mu_mean
    else:
        x, y = move.vertices
        a, b = levels[x], levels[y]
        levels[x] = a + mu * (b - a)
        levels[y] = b + mu * (a - b)


def apply_move(profile: WaterProfile, move: Move) -> WaterProfile:
    """One averaging round; total water is conserved exactly."""
    validate_move(profile.graph, move)
    levels = list(profile.levels)
    _apply_to_levels(levels, move)
    return profile.with_levels(levels)


def apply_sequence(
    profile: WaterProfile, seq: Sequence[Move], trace: bool = False
) -> WaterProfile | tuple[WaterProfile, list[WaterProfile]]:
    """Left fold of apply_move; with trace=True also returns every intermediate."""
    g = profile.graph
    levels = list(profile.levels)
    snapshots: list[WaterProfile] = []
    for move in seq:
        validate_move(g, move)
        _apply_to_levels(levels, move)
        if trace:
            snapshots.append(profile.with_levels(levels))
    final = profile.with_levels(levels)
    if trace:
        return final, snapshots
    return final


# -- the dual weight process --------------------------------------------------


@dataclass(frozen=True)
class SadProfile:
    """Unit mass shared out from start_vertex; weights are a convex combination.

    For the profile dual to a move sequence, dot(weights, initial levels)
    equals the final water level at start_vertex, exactly.
    """

    weights: tuple[Fraction, ...]
    start_vertex: int

    def __post_init__(self):
        total = sum(self.weights, Fraction(0))
        if total != 1:
            raise ValueError(f"weights sum to {total}, expected 1")
        if any(w < 0 for w in self.weights):
            raise ValueError("negative weight")

    def dot(self, profile: WaterProfile) -> Fraction:
        return sum((w * lv for w, lv in zip(self.weights, profile.levels)), Fraction(0))


def unit_mass_at(graph: Graph, v: int) -> SadProfile:
    weights = [Fraction(0)] * graph.n
    weights[v] = Fraction(1)
    return SadProfile(tuple(weights), v)


def evolve_sad(graph: Graph, start: int, moves: Sequence[Move]) -> SadProfile:
    """Run the sharing process forward from a unit mass at `start`."""
    weights = [Fraction(0)] * graph.n
    weights[start] = Fraction(1)
    for move in moves:
        validate_move(graph, move)
        _apply_to_levels(weights, move)
    return SadProfile(tuple(weights), start)


def dual_sad(graph: Graph, seq: Sequence[Move], target: int) -> SadProfile:
    """Dual weight profile of a move sequence for a target vertex.

    Starts from the unit mass at `target` and applies the moves of `seq` in
    reverse chronological order with the same mu. The resulting weights
    express the final level at `target` as a convex combination of initial
    levels, for every initial profile.
    """
    return evolve_sad(graph, target, list(reversed(seq)))


# -- energy ledger ------------------------------------------------------------


def energy_of(profile: WaterProfile, subset: Iterable[int]) -> Fraction:
    return sum((profile.levels[u] ** 2 for u in subset), Fraction(0))


@dataclass(frozen=True)
class EnergyLedger:
    """History of the summed squared levels over a fixed vertex set."""

    subset: frozenset[int]
    history: tuple[tuple[int, Fraction], ...] = ()

    @staticmethod
    def start(profile: WaterProfile, subset: Iterable[int]) -> "EnergyLedger":
        s = frozenset(subset)
        return EnergyLedger(s, ((0, energy_of(profile, s)),))

    def last(self) -> Fraction:
        return self.history[-1][1]


def energy_step(
    ledger: EnergyLedger, before: WaterProfile, move: Move, after: WaterProfile
) -> EnergyLedger:
    """Append the post-move energy of the tracked set."""
    k = ledger.history[-1][0] + 1 if ledger.history else 0
    return EnergyLedger(ledger.subset, ledger.history + ((k, energy_of(after, ledger.subset)),))


def single_edge_energy_drop(a: Fraction, b: Fraction, mu: Fraction) -> Fraction:
    """Exact energy decrease of one pipe opening with prior levels a, b.

    Equals 2*mu*(1-mu)*(b-a)^2; at mu = 1/2 this is 2*mu^2*(b-a)^2.
    """
    d = b - a
    return 2 * mu * (1 - mu) * d * d


# -- repeated sweeps ----------------------------------------------------------


def sweep_to_balance(
    profile: WaterProfile, edge_set: Iterable[tuple[int, int]], rounds: int
) -> WaterProfile:
    """Complete-average sweeps over a connected edge set, lexicographic order.

    Each round opens every pipe of the set once with mu = 1/2; the maximum
    deviation from the set average is non-increasing per round and tends to
    zero, so the levels inside the set approach their common mean.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    edges = sorted((min(x, y), max(x, y)) for x, y in edge_set)
    verts: set[int] = set()
    for x, y in edges:
        verts.add(x)
        verts.add(y)
    g = profile.graph
    for x, y in edges:
        if not g.has_edge(x, y):
            raise InvalidMoveError(f"edge ({x},{y}) not in graph")
    if not _edges_connect(edges, verts):
        raise InvalidMoveError("sweep edge set does not connect its vertex set")
    levels = list(profile.levels)
    for _ in range(rounds):
        for x, y in edges:
            avg = (levels[x] + levels[y]) / 2
            levels[x] = avg
            levels[y] = avg
    return profile.with_levels(levels)


def max_deviation(profile: WaterProfile, subset: Iterable[int]) -> Fraction:
    s = list(subset)
    mean = sum((profile.levels[u] for u in s), Fraction(0)) / len(s)
    return max(abs(profile.levels[u] - mean) for u in s)


# -- weight-profile sanity checks ---------------------------------------------


def is_line_graph(graph: Graph) -> bool:
    """Path shape: exactly two vertices of degree 1, the rest of degree 2."""
    if graph.n == 1:
        return True
    degs = sorted(graph.degree(u) for u in range(graph.n))
    if graph.n == 2:
        return degs == [1, 1]
    return degs[:2] == [1, 1] and all(d == 2 for d in degs[2:])


def line_order(graph: Graph) -> list[int]:
    """Vertices in path order, starting from the smaller-id endpoint."""
    if graph.n == 1:
        return [0]
    ends = [u for u in range(graph.n) if graph.degree(u) == 1]
    start = min(ends)
    order = [start]
    prev = -1
    cur = start
    while len(order) < graph.n:
        nxt = [w for w in graph.neighbors(cur) if w != prev]
        prev, cur = cur, nxt[0]
        order.append(cur)
    return order


def _weakly_unimodal(values: Sequence[Fraction]) -> bool:
    rising = True
    for i in range(1, len(values)):
        if rising:
            if values[i] < values[i - 1]:
                rising = False
        else:
            if values[i] > values[i - 1]:
                return False
    return True


@dataclass(frozen=True)
class SadPropertyReport:
    max_other_weight: Fraction
    max_other_ok: bool
    is_line: bool
    unimodal: bool | None
    distance_bound_ok: bool | None
    violations: tuple[str, ...] = ()

    @property
    def all_ok(self) -> bool:
        return not self.violations


def check_sad_properties(sad: SadProfile, graph: Graph) -> SadPropertyReport:
    """Report-only checks on a weight profile.

    (i) on any graph, the weight at a vertex other than the origin never
    exceeds 1/2; on path graphs additionally (ii) weak unimodality along the
    path and (iii) weight at w bounded by 1/(d(origin,w)+1).
    """
    v = sad.start_vertex
    others = [sad.weights[u] for u in range(graph.n) if u != v]
    max_other = max(others) if others else Fraction(0)
    max_other_ok = max_other <= HALF
    violations: list[str] = []
    if not max_other_ok:
        violations.append(f"weight {max_other} at a non-origin vertex exceeds 1/2")
    line = is_line_graph(graph)
    unimodal: bool | None = None
    dist_ok: bool | None = None
    if line:
        order = line_order(graph)
        values = [sad.weights[u] for u in order]
        unimodal = _weakly_unimodal(values)
        if not unimodal:
            violations.append("profile not weakly unimodal along the path")
        pos = {u: i for i, u in enumerate(order)}
        dist_ok = True
        for u in range(graph.n):
            if u == v:
                continue
            d = abs(pos[u] - pos[v])
            if sad.weights[u] > Fraction(1, d + 1):
                dist_ok = False
                violations.append(
                    f"weight {sad.weights[u]} at distance {d} exceeds 1/{d + 1}"
                )
    return SadPropertyReport(
        max_other_weight=max_other,
        max_other_ok=max_other_ok,
        is_line=line,
        unimodal=unimodal,
        distance_bound_ok=dist_ok,
        violations=tuple(violations),
    )


def probe_distance_bound(
    graph: Graph, start: int, trials: int, moves_per_trial: int, seed: int
) -> dict:
    """Experimental search for violations of the 1/(d+1) weight bound on
    non-path graphs. Evidence only; the bound is proven for paths and trees
    but open in general, so nothing here is asserted.
    """
    import random

    rng = random.Random(seed)
    edges = list(graph.edges())
    dist = _bfs_distances(graph, start)
    worst_ratio = Fraction(0)
    violations = []
    for t in range(trials):
        weights = [Fraction(0)] * graph.n
        weights[start] = Fraction(1)
        for _ in range(moves_per_trial):
            x, y = rng.choice(edges)
            mu = Fraction(rng.randrange(0, 9), 16)  # in [0, 1/2]
            a, b = weights[x], weights[y]
            weights[x] = a + mu * (b - a)
            weights[y] = b + mu * (a - b)
            for u in range(graph.n):
                if u == start:
                    continue
                bound = Fraction(1, dist[u] + 1)
                if bound > 0:
                    ratio = weights[u] / bound
                    if ratio > worst_ratio:
                        worst_ratio = ratio
                    if weights[u] > bound:
                        violations.append({"trial": t, "vertex": u, "weight": str(weights[u])})
    return {
        "trials": trials,
        "worst_ratio": float(worst_ratio),
        "violations": violations,
    }


def _bfs_distances(graph: Graph, start: int) -> list[int]:
    dist = [-1] * graph.n
    dist[start] = 0
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in graph.neighbors(x):
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


# -- move-sequence serialization ----------------------------------------------


def moves_to_json(graph: Graph, seq: Sequence[Move]) -> list[dict]:
    out = []
    for m in seq:
        entry: dict = {"mu": str(m.mu)}
        if m.is_macro:
            entry["macro"] = [[graph.name_of(x), graph.name_of(y)] for x, y in m.macro_edges]
        else:
            x, y = m.vertices
            entry["edge"] = [graph.name_of(x), graph.name_of(y)]
        out.append(entry)
    return out


def moves_from_json(graph: Graph, doc: Sequence[dict]) -> list[Move]:
    seq = []
    for i, entry in enumerate(doc):
        try:
            mu = parse_rational(entry.get("mu", "1/2"))
            if "edge" in entry:
                a, b = entry["edge"]
                move = Move.single(graph.id_of(str(a)), graph.id_of(str(b)), mu)
            elif "macro" in entry:
                edges = [(graph.id_of(str(a)), graph.id_of(str(b))) for a, b in entry["macro"]]
                move = Move.macro(edges, mu)
            else:
                raise InvalidMoveError("move needs 'edge' or 'macro'")
            validate_move(graph, move)
        except (ValueError, KeyError) as exc:
            raise InvalidMoveError(f"move {i}: {exc}") from exc
        seq.append(move)
    return seq
