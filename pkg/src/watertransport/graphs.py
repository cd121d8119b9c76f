"""Finite simple undirected graphs with exact water profiles.

Vertices are dense integers 0..n-1 internally; external names are mapped at
the load/dump boundary and retained for reporting. Graphs are immutable after
construction and safe to share across workers.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .rationals import decimal_str, exact_str, parse_rational

# Below this size adjacency is also cached as plain tuples for fast hot loops.
_ADJ_CACHE_LIMIT = 100_000


class InstanceError(ValueError):
    """Raised for malformed instances: parse errors, loops, disconnection."""


class Graph:
    """Simple connected undirected graph backed by a CSR adjacency.

    Construction validates simplicity (no self-loops, no duplicate edges) and
    connectivity; disconnected input is an error.
    """

    __slots__ = ("n", "edge_count", "names", "_indptr", "_indices", "_adj")

    def __init__(self, n: int, edges, names: Sequence[str] | None = None):
        if n <= 0:
            raise InstanceError("graph needs at least one vertex")
        if isinstance(edges, tuple) and len(edges) == 2 and isinstance(edges[0], np.ndarray):
            u = edges[0].astype(np.int64, copy=False)
            w = edges[1].astype(np.int64, copy=False)
        else:
            eu, ew = [], []
            for x, y in edges:
                eu.append(x)
                ew.append(y)
            u = np.asarray(eu, dtype=np.int64)
            w = np.asarray(ew, dtype=np.int64)
        if u.size:
            if u.min() < 0 or w.min() < 0 or u.max() >= n or w.max() >= n:
                raise InstanceError("edge endpoint out of range")
            if np.any(u == w):
                raise InstanceError("self-loop")
            lo, hi = np.minimum(u, w), np.maximum(u, w)
            keys = lo * np.int64(n) + hi
            keys_sorted = np.sort(keys)
            if np.any(keys_sorted[1:] == keys_sorted[:-1]):
                raise InstanceError("duplicate edge")
            u, w = lo, hi
        self.n = n
        self.edge_count = int(u.size)
        self.names = list(names) if names is not None else [str(i) for i in range(n)]
        if len(self.names) != n:
            raise InstanceError("name list length mismatch")
        both = np.concatenate([u, w])
        other = np.concatenate([w, u])
        order = np.argsort(both * np.int64(n) + other, kind="stable")
        self._indices = other[order]
        counts = np.bincount(both, minlength=n)
        self._indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self._adj: tuple[tuple[int, ...], ...] | None = None
        if n <= _ADJ_CACHE_LIMIT:
            ind = self._indices.tolist()
            ptr = self._indptr.tolist()
            self._adj = tuple(tuple(ind[ptr[i]:ptr[i + 1]]) for i in range(n))
        if not self._is_connected():
            raise InstanceError("disconnected graph")

    def _is_connected(self) -> bool:
        if self.n == 1:
            return True
        if self._adj is not None:
            seen = bytearray(self.n)
            seen[0] = 1
            stack = [0]
            count = 1
            adj = self._adj
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if not seen[y]:
                        seen[y] = 1
                        count += 1
                        stack.append(y)
            return count == self.n
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import connected_components
        mat = csr_matrix(
            (np.ones(len(self._indices), dtype=np.int8), self._indices, self._indptr),
            shape=(self.n, self.n),
        )
        ncomp, _ = connected_components(mat, directed=False)
        return ncomp == 1

    # -- queries ---------------------------------------------------------

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        if self._adj is None:
            ind = self._indices.tolist()
            ptr = self._indptr.tolist()
            self._adj = tuple(tuple(ind[ptr[i]:ptr[i + 1]]) for i in range(self.n))
        return self._adj

    def neighbors(self, u: int) -> Sequence[int]:
        if self._adj is not None:
            return self._adj[u]
        return self._indices[self._indptr[u]:self._indptr[u + 1]].tolist()

    def degree(self, u: int) -> int:
        return int(self._indptr[u + 1] - self._indptr[u])

    def max_degree(self) -> int:
        return int(np.max(np.diff(self._indptr))) if self.n else 0

    def has_edge(self, x: int, y: int) -> bool:
        if x == y:
            return False
        row = self._indices[self._indptr[x]:self._indptr[x + 1]]
        i = np.searchsorted(row, y)
        return bool(i < row.size and row[i] == y)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (u, w) with u < w, lexicographically."""
        for u in range(self.n):
            row = self.neighbors(u)
            for w in row:
                if w > u:
                    yield (u, w)

    def vertices(self) -> range:
        return range(self.n)

    def name_of(self, u: int) -> str:
        return self.names[u]

    def id_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InstanceError(f"unknown vertex name {name!r}") from None

    # -- subset helpers ----------------------------------------------------

    def is_connected_subset(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        if not s:
            return False
        start = next(iter(s))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self.neighbors(x):
                if y in s and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(s)

    def spanning_edges(self, subset: Iterable[int]) -> tuple[tuple[int, int], ...]:
        """Canonical spanning structure of a connected subset.

        Kruskal over the induced edges in lexicographic order; deterministic,
        so identical subsets always produce identical macro moves.
        """
        s = sorted(set(subset))
        sset = set(s)
        parent = {v: v for v in s}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        chosen = []
        for u in s:
            for w in self.neighbors(u):
                if w > u and w in sset:
                    ru, rw = find(u), find(w)
                    if ru != rw:
                        parent[ru] = rw
                        chosen.append((u, w))
        if len(chosen) != len(s) - 1:
            raise InstanceError("subset is not connected")
        return tuple(chosen)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


class WaterProfile:
    """Per-vertex exact rational levels in [0, capacity] on a graph."""

    __slots__ = ("graph", "levels", "capacity")

    def __init__(self, graph: Graph, levels: Sequence[Fraction], capacity: Fraction = Fraction(1)):
        # keep existing Fraction objects (large instances intern shared levels)
        levels = tuple(x if isinstance(x, Fraction) else Fraction(x) for x in levels)
        if len(levels) != graph.n:
            raise InstanceError("level count differs from vertex count")
        if capacity <= 0:
            raise InstanceError("capacity must be positive")
        for i, lv in enumerate(levels):
            if lv < 0 or lv > capacity:
                raise InstanceError(f"level out of [0,C] at vertex {graph.name_of(i)}")
        self.graph = graph
        self.levels = levels
        self.capacity = Fraction(capacity)

    def level(self, u: int) -> Fraction:
        return self.levels[u]

    def total(self) -> Fraction:
        return sum(self.levels, Fraction(0))

    def with_levels(self, levels: Sequence[Fraction]) -> "WaterProfile":
        return WaterProfile(self.graph, levels, self.capacity)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WaterProfile)
            and self.levels == other.levels
            and self.capacity == other.capacity
        )

    def __hash__(self):
        return hash((self.levels, self.capacity))

    def __repr__(self) -> str:
        shown = ", ".join(str(x) for x in self.levels[:6])
        if self.graph.n > 6:
            shown += ", ..."
        return f"WaterProfile([{shown}], C={self.capacity})"


# -- instance serialization -------------------------------------------------


def load_instance(text: str) -> tuple[Graph, WaterProfile]:
    """Parse the JSON instance format into a validated (Graph, WaterProfile).

    Format: {"capacity": "1", "vertices": [{"id": ..., "level": ...}, ...],
    "edges": [[id, id], ...]}. Levels and capacity are decimal or rational
    strings, parsed exactly. Capacity defaults to 1 when absent.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"parse error: {exc}") from exc
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise InstanceError("parse error: missing 'vertices'")
    try:
        capacity = parse_rational(doc.get("capacity", "1"))
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc
    names, levels = [], []
    seen = {}
    for entry in doc["vertices"]:
        name = str(entry["id"])
        if name in seen:
            raise InstanceError(f"duplicate vertex id {name!r}")
        seen[name] = len(names)
        names.append(name)
        try:
            levels.append(parse_rational(entry["level"]))
        except (KeyError, ValueError) as exc:
            raise InstanceError(f"bad level for vertex {name!r}: {exc}") from exc
    edges = []
    for pair in doc.get("edges", []):
        a, b = str(pair[0]), str(pair[1])
        if a not in seen or b not in seen:
            raise InstanceError(f"edge references unknown vertex: {pair}")
        edges.append((seen[a], seen[b]))
    graph = Graph(len(names), edges, names=names)
    profile = WaterProfile(graph, levels, capacity)
    return graph, profile


def dump_instance(graph: Graph, profile: WaterProfile) -> str:
    """Serialize deterministically (sorted keys, fixed separators)."""
    doc = {
        "capacity": exact_str(profile.capacity),
        "vertices": [
            {"id": graph.name_of(i), "level": exact_str(profile.levels[i])}
            for i in range(graph.n)
        ],
        "edges": [[graph.name_of(u), graph.name_of(w)] for u, w in graph.edges()],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def instance_summary(graph: Graph, profile: WaterProfile) -> dict:
    return {
        "vertices": graph.n,
        "edges": graph.edge_count,
        "capacity": {"exact": exact_str(profile.capacity), "decimal": decimal_str(profile.capacity)},
        "total_water": {"exact": exact_str(profile.total()), "decimal": decimal_str(profile.total())},
    }


# -- connected subset enumeration --------------------------------------------


def connected_subsets_containing(graph: Graph, v: int, max_size: int) -> Iterator[tuple[int, ...]]:
    """Yield every connected vertex set containing v of size <= max_size, once.

    Incremental neighbor expansion with a banned set so each subset is
    produced by exactly one branch; {v} is always yielded first. Subsets come
    out as sorted tuples.
    """
    if not (0 <= v < graph.n):
        raise InstanceError(f"vertex {v} out of range")
    if max_size < 1 or max_size > graph.n:
        raise InstanceError("max_size out of range")

    def rec(subset: tuple[int, ...], frontier: list[int], banned: set[int]) -> Iterator[tuple[int, ...]]:
        yield tuple(sorted(subset))
        if len(subset) == max_size:
            return
        local_banned = set(banned)
        for i, u in enumerate(frontier):
            rest = frontier[i + 1:]
            fresh = [
                w
                for w in graph.neighbors(u)
                if w not in subset and w != u and w not in local_banned and w not in rest and w not in frontier[:i + 1]
            ]
            yield from rec(subset + (u,), rest + fresh, local_banned)
            local_banned.add(u)

    start_frontier = [w for w in graph.neighbors(v)]
    yield from rec((v,), start_frontier, set())


def all_connected_subsets(graph: Graph, min_size: int = 2, max_size: int | None = None) -> list[tuple[int, ...]]:
    """All connected vertex sets with min_size <= |S| <= max_size, sorted.

    Each set is enumerated once, rooted at its minimum vertex (only vertices
    larger than the root participate, so roots partition the sets).
    """
    if max_size is None:
        max_size = graph.n
    out = []
    for root in range(graph.n):
        def rec(subset: tuple[int, ...], frontier: list[int], banned: set[int]):
            if len(subset) >= min_size:
                out.append(tuple(sorted(subset)))
            if len(subset) == max_size:
                return
            local_banned = set(banned)
            for i, u in enumerate(frontier):
                rest = frontier[i + 1:]
                fresh = [
                    w
                    for w in graph.neighbors(u)
                    if w > root and w not in subset and w not in local_banned and w not in rest and w not in frontier[:i + 1]
                ]
                rec(subset + (u,), rest + fresh, local_banned)
                local_banned.add(u)

        rec((root,), [w for w in graph.neighbors(root) if w > root], set())
    out.sort(key=lambda s: (len(s), s))
    return out
