"""Undirected simple graphs over taxpayer indices, plus the generators the
experiments use (star, toroidal grid) and an edge-list text format."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes 0..n-1.

    Edges are stored once as (u, v) with u < v; no self-loops. Neighbor
    tuples are sorted so that iteration order, and hence floating-point
    summation order downstream, is deterministic.
    """

    n: int
    edges: frozenset[tuple[int, int]]

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def closed_neighborhoods(self) -> tuple[tuple[int, ...], ...]:
        """For each x, the sorted tuple of x together with its neighbors."""
        return tuple(
            tuple(sorted((x, *self.neighbors[x]))) for x in range(self.n)
        )

    def degree(self, x: int) -> int:
        return len(self.neighbors[x])


def from_edge_list(n: int, pairs: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph from index pairs; symmetric duplicates are merged."""
    if n < 1:
        raise ValueError(f"graph needs at least 1 node, got {n}")
    edges: set[tuple[int, int]] = set()
    for u, v in pairs:
        if not (0 <= u < n) or not (0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for {n} nodes")
        if u == v:
            raise ValueError(f"self-loop at node {u} not allowed")
        edges.add((u, v) if u < v else (v, u))
    return Graph(n=n, edges=frozenset(edges))


def star(n: int) -> Graph:
    """Hub node 0 connected to every other node; no other edges."""
    if n < 2:
        raise ValueError(f"star graph needs at least 2 nodes, got {n}")
    return Graph(n=n, edges=frozenset((0, i) for i in range(1, n)))


def torus(w: int, h: int) -> Graph:
    """h-by-w grid wrapped in both directions; every node has degree 4.

    Node (i, j) sits at index i*w + j and is adjacent to (i±1 mod h, j) and
    (i, j±1 mod w). Dimensions below 3 would collapse wraparound edges into
    duplicates, so they are rejected.
    """
    if w < 3 or h < 3:
        raise ValueError(f"torus dimensions must be at least 3, got {w}x{h}")
    edges: set[tuple[int, int]] = set()
    for i in range(h):
        for j in range(w):
            a = i * w + j
            right = i * w + (j + 1) % w
            down = ((i + 1) % h) * w + j
            edges.add((a, right) if a < right else (right, a))
            edges.add((a, down) if a < down else (down, a))
    return Graph(n=w * h, edges=frozenset(edges))


def neighborhood(g: Graph, x: int) -> frozenset[int]:
    """Closed neighborhood: x together with all of its graph neighbors."""
    if not 0 <= x < g.n:
        raise ValueError(f"node {x} out of range for {g.n} nodes")
    return frozenset((x, *g.neighbors[x]))


def parse_edge_list(text: str, n: int | None = None) -> Graph:
    """Parse the "u v" per-line format; blank lines and # comments ignored.

    Indices are 0-based. When n is omitted it is inferred as one past the
    largest index seen.
    """
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: non-integer index in {raw!r}") from exc
        pairs.append((u, v))
    if n is None:
        if not pairs:
            raise ValueError("empty edge list and no node count given")
        n = max(max(u, v) for u, v in pairs) + 1
    return from_edge_list(n, pairs)


def load_edge_list(path: str, n: int | None = None) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), n=n)


def edge_pairs(g: Graph) -> list[tuple[int, int]]:
    """Edges as a sorted list, for serialization."""
    return sorted(g.edges)
