import random
from fractions import Fraction

import pytest

from watertransport.dynamics import Move
from watertransport.graphs import Graph, WaterProfile, all_connected_subsets


def random_connected_graph(rng: random.Random, n: int, extra_edges: int | None = None) -> Graph:
    """Random spanning tree plus a few extra edges; connected by construction."""
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        j = rng.randrange(i)
        a, b = order[i], order[j]
        edges.add((min(a, b), max(a, b)))
    if extra_edges is None:
        extra_edges = rng.randint(0, n)
    for _ in range(extra_edges):
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))
    return Graph(n, edges)


def random_profile(rng: random.Random, graph: Graph, denominator: int = 64) -> WaterProfile:
    return WaterProfile(
        graph, [Fraction(rng.randrange(0, denominator + 1), denominator) for _ in range(graph.n)]
    )


def random_moves(
    rng: random.Random,
    graph: Graph,
    length: int,
    macro_prob: float = 0.3,
    full_macros_only: bool = False,
) -> list[Move]:
    """Mixed single-edge and macro moves with assorted mu in [0, 1/2].

    full_macros_only restricts macro moves to mu = 1/2 (complete averages),
    the only macros expressible as limits of single-edge sequences; partial
    macros can break path unimodality (see test_partial_macro_breaks_unimodality).
    """
    edges = list(graph.edges())
    macro_sets = [s for s in all_connected_subsets(graph, 3, min(graph.n, 5))]
    moves = []
    for _ in range(length):
        mu = Fraction(rng.randrange(0, 9), 16)
        if macro_sets and rng.random() < macro_prob:
            macro_mu = Fraction(1, 2) if full_macros_only else mu
            moves.append(Move.macro_over(graph, rng.choice(macro_sets), macro_mu))
        else:
            moves.append(Move.single(*rng.choice(edges), mu))
    return moves


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def line_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
