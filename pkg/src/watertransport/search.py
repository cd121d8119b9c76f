"""Certified lower bounds (and small-instance exact values) for peak levels.

States are water profiles; branching applies complete averages (mu = 1/2)
over candidate vertex sets. At every node the best pooling over a connected
set containing the target is evaluated as an implicit final move, so a
depth-D search covers every macro sequence of at most D moves whose last
move involves the target (the last move may always be assumed to).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dynamics import Move
from .exact import EnumerationCapExceeded, GlaResult, gla
from .graphs import Graph, WaterProfile, all_connected_subsets, connected_subsets_containing


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = 3
    beam_width: int | None = None  # None = unlimited (exhaustive)
    candidate_sets: str = "all-connected"  # or "edges-only"
    max_set_size: int | None = None
    final_pooling: str = "gla"  # "gla" | "edges-at-v" | "none"
    exhaustive_vertex_cap: int = 12
    time_budget: float | None = None  # seconds
    node_budget: int | None = None

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.beam_width is not None and self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if self.candidate_sets not in ("all-connected", "edges-only"):
            raise ValueError(f"unknown candidate_sets {self.candidate_sets!r}")
        if self.final_pooling not in ("gla", "edges-at-v", "none"):
            raise ValueError(f"unknown final_pooling {self.final_pooling!r}")


@dataclass
class SearchResult:
    best_value: Fraction
    best_sequence: tuple[Move, ...]
    nodes_expanded: int
    exhausted: bool
    claim: str

    def replay_value(self, profile: WaterProfile, v: int) -> Fraction:
        from .dynamics import apply_sequence

        return apply_sequence(profile, list(self.best_sequence)).levels[v]


def upper_bound(graph: Graph, profile: WaterProfile, v: int) -> Fraction:
    """Maximum level anywhere; moves only form convex combinations, so no
    sequence can push any level above it."""
    return max(profile.levels)


def _candidate_sets(graph: Graph, cfg: SearchConfig) -> list[tuple[int, ...]]:
    if cfg.candidate_sets == "edges-only":
        return [tuple(e) for e in graph.edges()]
    cap = cfg.max_set_size or graph.n
    return all_connected_subsets(graph, 2, cap)


def _final_sets(graph: Graph, v: int, cfg: SearchConfig) -> list[tuple[int, ...]]:
    if cfg.final_pooling == "none":
        return []
    if cfg.final_pooling == "edges-at-v":
        return [tuple(sorted((v, w))) for w in graph.neighbors(v)]
    cap = cfg.max_set_size or graph.n
    return [s for s in connected_subsets_containing(graph, v, cap) if len(s) >= 2]


def search_kappa(graph: Graph, profile: WaterProfile, v: int, cfg: SearchConfig | None = None) -> SearchResult:
    """Search over complete-average macro sequences for the best level at v.

    Exhaustive (beam_width None) searches enumerate every sequence up to
    max_depth; `exhausted` then certifies best_value as the maximum over
    them. mu is restricted to 1/2 since partial openings never help an
    optimal sequence and skipping a move is the mu = 0 case.
    """
    cfg = cfg or SearchConfig()
    if cfg.beam_width is None and graph.n > cfg.exhaustive_vertex_cap:
        raise EnumerationCapExceeded(
            f"exhaustive search capped at {cfg.exhaustive_vertex_cap} vertices; use a beam"
        )
    deadline = time.monotonic() + cfg.time_budget if cfg.time_budget else None
    candidates = _candidate_sets(graph, cfg)
    finals = _final_sets(graph, v, cfg)
    n = graph.n
    state = {
        "best_value": profile.levels[v],
        "best_moves": (),  # tuple of vertex tuples; Move objects built at the end
        "nodes": 0,
        "truncated": False,
    }

    def consider(value: Fraction, moves: tuple[tuple[int, ...], ...]) -> None:
        cur = state["best_value"]
        if value > cur or (
            value == cur
            and (len(moves), moves) < (len(state["best_moves"]), state["best_moves"])
        ):
            state["best_value"] = value
            state["best_moves"] = moves

    def over_budget() -> bool:
        if deadline is not None and time.monotonic() > deadline:
            return True
        if cfg.node_budget is not None and state["nodes"] >= cfg.node_budget:
            return True
        return False

    if cfg.beam_width is None:
        visited: dict[tuple, int] = {}

        def dfs(levels: tuple[Fraction, ...], depth: int, moves: tuple[tuple[int, ...], ...]) -> None:
            state["nodes"] += 1
            consider(levels[v], moves)
            if depth + 1 <= cfg.max_depth:
                for s in finals:
                    m = sum((levels[u] for u in s), Fraction(0)) / len(s)
                    consider(m, moves + (s,))
            if depth + 2 > cfg.max_depth:
                return
            if over_budget():
                state["truncated"] = True
                return
            bound = max(levels)
            if bound < state["best_value"]:
                return
            remaining = cfg.max_depth - depth
            refined = bound - (bound - levels[v]) / Fraction(n**remaining)
            if refined < state["best_value"]:
                return
            for s in candidates:
                m = sum((levels[u] for u in s), Fraction(0)) / len(s)
                child = list(levels)
                for u in s:
                    child[u] = m
                child_t = tuple(child)
                seen = visited.get(child_t)
                if seen is not None and seen <= depth + 1:
                    continue
                visited[child_t] = depth + 1
                dfs(child_t, depth + 1, moves + (s,))

        dfs(profile.levels, 0, ())
        exhausted = not state["truncated"]
    else:
        frontier: list[tuple[tuple[Fraction, ...], tuple[tuple[int, ...], ...]]] = [
            (profile.levels, ())
        ]
        ever_truncated = False
        for depth in range(cfg.max_depth + 1):
            scored = []
            for levels, moves in frontier:
                state["nodes"] += 1
                consider(levels[v], moves)
                if depth + 1 <= cfg.max_depth:
                    best_pool = None
                    for s in finals:
                        m = sum((levels[u] for u in s), Fraction(0)) / len(s)
                        consider(m, moves + (s,))
                        if best_pool is None or m > best_pool:
                            best_pool = m
                    score = max(levels[v], best_pool) if best_pool is not None else levels[v]
                else:
                    score = levels[v]
                scored.append((score, levels, moves))
            if depth + 2 > cfg.max_depth or over_budget():
                if over_budget():
                    ever_truncated = True
                break
            scored.sort(key=lambda t: (-t[0], t[2]))
            if len(scored) > cfg.beam_width:
                ever_truncated = True
                scored = scored[: cfg.beam_width]
            nxt = []
            seen_states: set[tuple] = set()
            for _, levels, moves in scored:
                for s in candidates:
                    m = sum((levels[u] for u in s), Fraction(0)) / len(s)
                    child = list(levels)
                    for u in s:
                        child[u] = m
                    child_t = tuple(child)
                    if child_t in seen_states:
                        continue
                    seen_states.add(child_t)
                    nxt.append((child_t, moves + (s,)))
            frontier = nxt
        exhausted = not ever_truncated
    moves = tuple(
        Move.single(*s) if len(s) == 2 else Move.macro_over(graph, s)
        for s in state["best_moves"]
    )
    claim = (
        f"conjectured-exact(macro-depth={cfg.max_depth} exhausted)"
        if exhausted
        else "lower-bound"
    )
    return SearchResult(
        best_value=state["best_value"],
        best_sequence=moves,
        nodes_expanded=state["nodes"],
        exhausted=exhausted,
        claim=claim,
    )


# -- structured improvement hints ---------------------------------------------


@dataclass(frozen=True)
class BottleneckInfo:
    vertex: int
    level: Fraction
    is_cut_vertex: bool
    improving_sets: tuple[tuple[tuple[int, ...], Fraction], ...]  # (set, avg)


@dataclass(frozen=True)
class EnlargementInfo:
    boundary_vertex: int
    extension: tuple[int, ...]  # animal extension whose average rises past the GLA
    pooling_set: tuple[int, ...]
    new_value: Fraction


@dataclass(frozen=True)
class ImprovementPlan:
    gla: GlaResult
    bottlenecks: tuple[BottleneckInfo, ...]
    enlargements: tuple[EnlargementInfo, ...]

    @property
    def empty(self) -> bool:
        return not self.bottlenecks and not self.enlargements


def _is_cut_vertex(graph: Graph, subset: Sequence[int], u: int) -> bool:
    rest = [x for x in subset if x != u]
    if len(rest) <= 1:
        return False
    return not graph.is_connected_subset(rest)


def improvement_plan(
    graph: Graph,
    profile: WaterProfile,
    v: int,
    set_cap: int = 4,
    max_reported: int = 5,
) -> ImprovementPlan:
    """Advisory decomposition of how the initial best animal could improve.

    Lists bottleneck vertices of the current best animal (members below its
    average, flagged when they are cut vertices) with small connected sets
    whose pooling would lift them, and boundary vertices whose improvement
    would let the animal grow. Feeds UI hints and search seeding only.
    """
    base = gla(graph, profile, v)
    animal = set(base.subset)
    levels = profile.levels
    bottlenecks = []
    for u in sorted(animal - {v}):
        if levels[u] >= base.value:
            continue
        improving = []
        for cand in connected_subsets_containing(graph, u, min(set_cap, graph.n)):
            if len(cand) < 2:
                continue
            inside = [x for x in cand if x in animal]
            avg_cand = sum((levels[x] for x in cand), Fraction(0)) / len(cand)
            avg_inside = sum((levels[x] for x in inside), Fraction(0)) / len(inside)
            if avg_cand > avg_inside:
                improving.append((cand, avg_cand))
        improving.sort(key=lambda t: (-t[1], len(t[0]), t[0]))
        bottlenecks.append(
            BottleneckInfo(
                vertex=u,
                level=levels[u],
                is_cut_vertex=_is_cut_vertex(graph, base.subset, u),
                improving_sets=tuple(improving[:max_reported]),
            )
        )
    enlargements = []
    boundary = sorted({w for x in animal for w in graph.neighbors(x)} - animal)
    outside = [x for x in range(graph.n) if x not in animal]
    for u in boundary:
        ext_candidates = _connected_outside(graph, u, outside, set_cap)
        pool_candidates = [
            s for s in ext_candidates
            if len(s) >= 2 and sum((levels[x] for x in s), Fraction(0)) / len(s) > levels[u]
        ]
        found = None
        for ext in ext_candidates:
            union = sorted(animal | set(ext))
            base_avg = sum((levels[x] for x in union), Fraction(0)) / len(union)
            if base_avg > base.value:
                continue  # plain enlargement already profitable; not a bottleneck case
            for pool in pool_candidates:
                pooled = dict(enumerate(levels))
                mean_pool = sum((levels[x] for x in pool), Fraction(0)) / len(pool)
                for x in pool:
                    pooled[x] = mean_pool
                new_avg = sum((pooled[x] for x in union), Fraction(0)) / len(union)
                if new_avg > base.value:
                    found = EnlargementInfo(u, tuple(ext), tuple(pool), new_avg)
                    break
            if found:
                break
        if found:
            enlargements.append(found)
    return ImprovementPlan(base, tuple(bottlenecks), tuple(enlargements[:max_reported]))


def _connected_outside(graph: Graph, u: int, outside: Sequence[int], cap: int) -> list[tuple[int, ...]]:
    allowed = set(outside)
    results = []

    def rec(subset: tuple[int, ...], frontier: list[int], banned: set[int]):
        results.append(tuple(sorted(subset)))
        if len(subset) >= cap:
            return
        local = set(banned)
        for i, w in enumerate(frontier):
            rest = frontier[i + 1:]
            fresh = [
                y
                for y in graph.neighbors(w)
                if y in allowed and y not in subset and y not in local and y not in rest and y != w
            ]
            rec(subset + (w,), rest + fresh, local)
            local.add(w)

    rec((u,), [w for w in graph.neighbors(u) if w in allowed], set())
    return sorted(results, key=lambda s: (len(s), s))
