"""Small undirected graphs: lattice builders, BFS distances, shells."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


def _canonical_edges(edges) -> tuple[tuple[int, int], ...]:
    out = set()
    for e in edges:
        x, y = int(e[0]), int(e[1])
        if x == y:
            raise ValueError(f"self-loop at vertex {x}")
        out.add((min(x, y), max(x, y)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class Graph:
    """Finite undirected simple graph with a distinguished origin vertex."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    origin: int = 0
    _adj: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        verts = tuple(sorted(set(int(v) for v in self.vertices)))
        edges = _canonical_edges(self.edges)
        for x, y in edges:
            if x not in verts or y not in verts:
                raise ValueError(f"edge ({x},{y}) uses an unknown vertex")
        if self.origin not in verts:
            raise ValueError(f"origin {self.origin} is not a vertex")
        adj = {v: [] for v in verts}
        for x, y in edges:
            adj[x].append(y)
            adj[y].append(x)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_adj", {v: tuple(sorted(ns)) for v, ns in adj.items()})

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def distances_from(self, v: int) -> dict[int, int]:
        """BFS graph distances; unreachable vertices are absent from the map."""
        dist = {v: 0}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in self._adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def distance(self, x: int, y: int) -> float:
        return self.distances_from(x).get(y, float("inf"))

    def shells(self, root: int | None = None) -> list[list[int]]:
        """Vertices grouped by distance from the root (origin by default)."""
        root = self.origin if root is None else root
        dist = self.distances_from(root)
        if not dist:
            return []
        out = [[] for _ in range(max(dist.values()) + 1)]
        for v, d in sorted(dist.items()):
            out[d].append(v)
        return out

    def component(self, v: int) -> frozenset[int]:
        return frozenset(self.distances_from(v))


def chain(n: int, origin: int = 0) -> Graph:
    """Open chain on vertices 0..n-1."""
    return Graph(tuple(range(n)), tuple((i, i + 1) for i in range(n - 1)), origin)


def ring(n: int, origin: int = 0) -> Graph:
    """Closed chain on vertices 0..n-1."""
    if n < 3:
        raise ValueError("a ring needs at least 3 vertices")
    edges = [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)]
    return Graph(tuple(range(n)), tuple(edges), origin)


def grid(rows: int, cols: int, origin: int = 0) -> Graph:
    """Open rectangular grid, vertices numbered row-major."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(tuple(range(rows * cols)), tuple(edges), origin)


def custom(edges, origin: int = 0, vertices=None) -> Graph:
    """Graph from an explicit edge list; vertices default to those of the edges."""
    canon = _canonical_edges(edges)
    if vertices is None:
        verts = sorted({v for e in canon for v in e} | {origin})
    else:
        verts = list(vertices)
    return Graph(tuple(verts), canon, origin)
