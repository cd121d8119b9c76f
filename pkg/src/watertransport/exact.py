"""Closed-form and polynomial peak-level solvers for solvable graph classes.

kappa(v) denotes the supremum of water levels achievable at the target vertex
over finite move sequences. Complete graphs, star centers and path graphs
admit exact polynomial solutions; everything else goes through search.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .dynamics import Move, is_line_graph, line_order
from .graphs import Graph, WaterProfile, connected_subsets_containing


class EnumerationCapExceeded(ValueError):
    """Exact enumeration refused: instance larger than the configured cap."""


class WrongGraphClass(ValueError):
    """Solver preconditions on the graph shape are not met."""


# -- greedy lattice animals ----------------------------------------------------


@dataclass(frozen=True)
class GlaResult:
    """Best-average connected vertex set containing the target."""

    subset: tuple[int, ...]
    value: Fraction
    witness: Move | None  # pooling move attaining the value; None for singletons
    exact: bool  # exact enumeration vs greedy lower bound


def _pool_move(graph: Graph, subset: Sequence[int]) -> Move | None:
    if len(subset) < 2:
        return None
    return Move.macro_over(graph, subset)


def gla(
    graph: Graph,
    profile: WaterProfile,
    v: int,
    mode: str = "exact",
    cap: int = 20,
) -> GlaResult:
    """Maximize the average level over connected sets containing v.

    Exact mode enumerates every connected set containing v (graphs up to
    `cap` vertices); greedy mode grows the set by the best marginal average
    improvement and only yields a lower bound.
    """
    levels = profile.levels
    if mode == "exact":
        if graph.n > cap:
            raise EnumerationCapExceeded(
                f"exact enumeration capped at {cap} vertices (graph has {graph.n})"
            )
        best_set: tuple[int, ...] = (v,)
        best_val = levels[v]
        best_key = (1, (v,))
        for subset in connected_subsets_containing(graph, v, graph.n):
            val = sum((levels[u] for u in subset), Fraction(0)) / len(subset)
            key = (len(subset), subset)
            if val > best_val or (val == best_val and key < best_key):
                best_val, best_set, best_key = val, subset, key
        return GlaResult(best_set, best_val, _pool_move(graph, best_set), exact=True)
    if mode == "greedy":
        current = [v]
        members = {v}
        total = levels[v]
        while True:
            boundary = sorted(
                {w for u in current for w in graph.neighbors(u)} - members
            )
            best_u = None
            best_val = total / len(current)
            for u in boundary:
                cand = (total + levels[u]) / (len(current) + 1)
                if cand > best_val:
                    best_val, best_u = cand, u
            if best_u is None:
                break
            current.append(best_u)
            members.add(best_u)
            total += levels[best_u]
        subset = tuple(sorted(current))
        return GlaResult(subset, total / len(subset), _pool_move(graph, subset), exact=False)
    raise ValueError(f"unknown mode {mode!r}")


# -- peak-level results ---------------------------------------------------------


@dataclass(frozen=True)
class KappaResult:
    """Supremum of achievable levels plus a replayable certificate.

    Finite certificates (and macro certificates) attain `value` exactly on
    replay. `attained` records whether some finite single-edge sequence
    reaches the value; when False the certificate uses macro moves whose
    single-edge realizations only approach the value in the limit.
    `gla_attains` (path interiors only) flags whether pooling a single
    connected set already reaches the optimum; False means the initial best
    animal has little to do with the optimal move sequence.
    """

    value: Fraction
    certificate: tuple[Move, ...]
    attained: bool
    sad_weights: tuple[Fraction, ...]
    solver: str
    gla_attains: bool | None = None


def _weights_from_blocks(n: int, blocks: Sequence[tuple[int, int, Fraction]]) -> tuple[Fraction, ...]:
    w = [Fraction(0)] * n
    for lo, hi, val in blocks:  # inclusive index range
        for i in range(lo, hi + 1):
            w[i] = val
    return tuple(w)


def is_complete(graph: Graph) -> bool:
    return graph.edge_count == graph.n * (graph.n - 1) // 2


def is_star_center(graph: Graph, v: int) -> bool:
    return graph.n >= 3 and graph.edge_count == graph.n - 1 and graph.degree(v) == graph.n - 1


def kappa_complete(profile: WaterProfile, v: int) -> KappaResult:
    """Exact peak level when every helper barrel is directly reachable.

    Applies to complete graphs and to the center of a star. Ranking the
    levels in descending order with v at rank l, the optimum is
    2^(1-l) * level(v) + sum_i 2^(-i) * level(rank i), attained by opening
    the pipe to the next-higher barrel each round, fullest barrel last.
    """
    g = profile.graph
    if not (is_complete(g) or is_star_center(g, v)):
        raise WrongGraphClass("graph is neither complete nor a star centered at v")
    levels = profile.levels
    order = sorted(range(g.n), key=lambda u: (-levels[u], u))
    l = order.index(v) + 1
    value = Fraction(2) ** (1 - l) * levels[v]
    weights = [Fraction(0)] * g.n
    weights[v] = Fraction(2) ** (1 - l)
    for i in range(1, l):
        value += Fraction(1, 2**i) * levels[order[i - 1]]
        weights[order[i - 1]] = Fraction(1, 2**i)
    certificate = tuple(Move.single(v, order[l - k - 1]) for k in range(1, l))
    return KappaResult(
        value=value,
        certificate=certificate,
        attained=True,
        sad_weights=tuple(weights),
        solver="complete" if is_complete(g) else "star-center",
    )


def _require_line(graph: Graph) -> list[int]:
    if not is_line_graph(graph):
        raise WrongGraphClass("graph is not a path")
    return line_order(graph)


def kappa_line_endpoint(profile: WaterProfile, v: int) -> KappaResult:
    """Peak level at an end of a path: the best prefix average.

    The certificate is one pooling move over the shortest maximizing prefix;
    prefixes of length one or two are reached by a finite single-edge
    sequence, longer ones only as macro moves / limits.
    """
    g = profile.graph
    order = _require_line(g)
    if g.n == 1:
        return KappaResult(profile.levels[v], (), True, (Fraction(1),), "line-endpoint")
    if v == order[-1]:
        order = order[::-1]
    if v != order[0]:
        raise WrongGraphClass("target vertex is not an end of the path")
    levels = profile.levels
    best = levels[v]
    best_len = 1
    total = Fraction(0)
    for i, u in enumerate(order, start=1):
        total += levels[u]
        avg = total / i
        if avg > best:
            best, best_len = avg, i
    prefix = order[:best_len]
    if best_len == 1:
        cert: tuple[Move, ...] = ()
    elif best_len == 2:
        cert = (Move.single(prefix[0], prefix[1]),)
    else:
        cert = (Move.macro_over(g, prefix),)
    weights = [Fraction(0)] * g.n
    for u in prefix:
        weights[u] = Fraction(1, best_len)
    return KappaResult(
        value=best,
        certificate=cert,
        attained=best_len <= 2,
        sad_weights=tuple(weights),
        solver="line-endpoint",
    )


def kappa_line_interior(profile: WaterProfile, v: int) -> KappaResult:
    """Peak level anywhere on a path via the two-block weight profiles.

    Every optimal weight profile can be chosen piecewise constant with two
    nonzero values: a top block of weight 1/(r-p+1) on the far side of the
    target and a flat low block toward the other end. Enumerating the block
    boundaries (l, q, r) in both orientations and evaluating each candidate
    takes O(n^3) exact evaluations.
    """
    g = profile.graph
    order = _require_line(g)
    n = g.n
    pos_levels = [profile.levels[u] for u in order]
    p = order.index(v) + 1  # 1-indexed position of the target
    prefix = [Fraction(0)] * (n + 1)
    for i in range(1, n + 1):
        prefix[i] = prefix[i - 1] + pos_levels[i - 1]

    def seg(a: int, b: int) -> Fraction:  # sum of positions a..b inclusive
        return prefix[b] - prefix[a - 1]

    best: Fraction | None = None
    best_key = None
    best_desc = None  # (orientation, l, q, r)
    attained_any = False
    for case_rank, case in enumerate(("right-top", "left-top")):
        for l in range(1, p + 1):
            for q in range(p, n + 1) if case == "right-top" else range(l, p + 1):
                for r in range(q, n + 1) if case == "right-top" else range(p, n + 1):
                    if case == "right-top":
                        top = Fraction(1, r - p + 1)
                        val = top * seg(q, r)
                        far_mass = Fraction(0)
                        if q > l:
                            low = Fraction(q - p, (q - l) * (r - p + 1))
                            val += low * seg(l, q - 1)
                            far_mass = low * (p - l)  # mass left of the target
                        pools = (q - l, r - p + 1)
                        distance = q - p
                    else:
                        qh = q
                        top = Fraction(1, p - l + 1)
                        val = top * seg(l, qh)
                        far_mass = Fraction(0)
                        if r > qh:
                            low = Fraction(p - qh, (r - qh) * (p - l + 1))
                            val += low * seg(qh + 1, r)
                            far_mass = low * (r - p)  # mass right of the target
                        pools = (r - qh, p - l + 1)
                        distance = p - qh
                    edge_realizable = all(s <= 2 for s in pools)
                    # canonical witness: maximal replaced far-side mass, then
                    # minimal mode distance (the order the optimality argument
                    # fixes them); ties resolve lexicographically
                    key = (-far_mass, distance, case_rank, l, q, r)
                    if best is None or val > best:
                        best, best_key, best_desc = val, key, (case, l, q, r)
                        attained_any = edge_realizable
                    elif val == best:
                        attained_any = attained_any or edge_realizable
                        if key < best_key:
                            best_key, best_desc = key, (case, l, q, r)

    case, l, q, r = best_desc
    moves: list[Move] = []
    if case == "right-top":
        if q - l >= 2:
            moves.append(Move.macro_over(g, [order[i - 1] for i in range(l, q)]))
        if r - p + 1 >= 2:
            moves.append(Move.macro_over(g, [order[i - 1] for i in range(p, r + 1)]))
        blocks = []
        if q > l:
            blocks.append((l - 1, q - 2, Fraction(q - p, (q - l) * (r - p + 1))))
        blocks.append((q - 1, r - 1, Fraction(1, r - p + 1)))
    else:
        qh = q
        if r - qh >= 2:
            moves.append(Move.macro_over(g, [order[i - 1] for i in range(qh + 1, r + 1)]))
        if p - l + 1 >= 2:
            moves.append(Move.macro_over(g, [order[i - 1] for i in range(l, p + 1)]))
        blocks = [(l - 1, qh - 1, Fraction(1, p - l + 1))]
        if r > qh:
            blocks.append((qh, r - 1, Fraction(p - qh, (r - qh) * (p - l + 1))))
    pos_weights = _weights_from_blocks(n, blocks)
    weights = [Fraction(0)] * n
    for i, u in enumerate(order):
        weights[u] = pos_weights[i]
    flat_best = max(
        seg(a, b) / Fraction(b - a + 1)
        for a in range(1, p + 1)
        for b in range(p, n + 1)
    )
    return KappaResult(
        value=best,
        certificate=tuple(moves),
        attained=attained_any,
        sad_weights=tuple(weights),
        solver="line-interior",
        gla_attains=flat_best == best,
    )


def kappa_line3_middle(profile: WaterProfile) -> KappaResult:
    """Middle vertex of a three-vertex path: six candidate values.

    The four connected-set averages plus the two one-and-a-half-step values
    (pool one end pair, then the middle with the other end).
    """
    g = profile.graph
    order = _require_line(g)
    if g.n != 3:
        raise WrongGraphClass("graph is not a three-vertex path")
    a, m, c = order
    la, lm, lc = profile.levels[a], profile.levels[m], profile.levels[c]
    e_am = Move.single(a, m)
    e_mc = Move.single(m, c)
    candidates: list[tuple[Fraction, tuple[Move, ...], tuple[Fraction, Fraction, Fraction]]] = [
        (lm, (), (Fraction(0), Fraction(1), Fraction(0))),
        ((la + lm) / 2, (e_am,), (Fraction(1, 2), Fraction(1, 2), Fraction(0))),
        ((lm + lc) / 2, (e_mc,), (Fraction(0), Fraction(1, 2), Fraction(1, 2))),
        (
            (la + lm + lc) / 3,
            (Move.macro_over(g, [a, m, c]),),
            (Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
        ),
        (
            (la + (lm + lc) / 2) / 2,
            (e_mc, e_am),
            (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)),
        ),
        (
            (lc + (la + lm) / 2) / 2,
            (e_am, e_mc),
            (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)),
        ),
    ]
    best_val, best_cert, best_w = candidates[0]
    for val, cert, w in candidates[1:]:
        if val > best_val:
            best_val, best_cert, best_w = val, cert, w
    attained = all(not mv.is_macro for mv in best_cert)
    weights = [Fraction(0)] * 3
    for i, u in enumerate((a, m, c)):
        weights[u] = best_w[i]
    return KappaResult(best_val, best_cert, attained, tuple(weights), "line3-middle")


# -- dispatch ------------------------------------------------------------------


def detect_class(graph: Graph, v: int) -> str | None:
    """Which closed form applies: complete, star-center, line end/interior."""
    if is_complete(graph):
        return "complete"
    if is_star_center(graph, v):
        return "star-center"
    if is_line_graph(graph):
        order = line_order(graph)
        if v == order[0] or v == order[-1]:
            return "line-endpoint"
        if graph.n == 3:
            return "line3-middle"
        return "line-interior"
    return None


def kappa_closed_form(profile: WaterProfile, v: int) -> KappaResult | None:
    """Dispatch to the matching solved class; None when no closed form applies."""
    cls = detect_class(profile.graph, v)
    if cls in ("complete", "star-center"):
        return kappa_complete(profile, v)
    if cls == "line-endpoint":
        return kappa_line_endpoint(profile, v)
    if cls == "line3-middle":
        return kappa_line3_middle(profile)
    if cls == "line-interior":
        return kappa_line_interior(profile, v)
    return None
