"""Undirected graph core: representation, generators, and brute-force oracles.

Every distributed algorithm in this repo is checked against the plain
BFS-based oracles defined here, so this module stays deliberately simple.
Node ids are dense integers in [0, n) and neighbor lists are sorted, which
makes all traversals deterministic.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Raised for malformed, disconnected, or otherwise unusable graphs."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected connected graph with sorted adjacency lists."""

    n: int
    adj: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_edges(
        n: int, edges: Iterable[tuple[int, int]], *, require_connected: bool = True
    ) -> "Graph":
        if n <= 0:
            raise GraphError("graph must have at least one node")
        neigh: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            neigh[u].add(v)
            neigh[v].add(u)
        g = Graph(n, tuple(tuple(sorted(s)) for s in neigh))
        if require_connected:
            bfs_distances(g, 0)  # raises naming the unreachable node
        return g

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)


@dataclass(frozen=True)
class BipartiteGadget:
    """Two-sided gadget graph: a cut of tracked edges between a left and right part.

    ``cut_edges`` are only the left-right edges; edges inside each part live in
    ``graph`` like any other edge.  ``roles`` maps structural labels such as
    ``"a"``, ``"b"``, ``"l3"``, ``"lp0"``, ``"r2"``, ``"rp1"`` to node ids.
    """

    graph: Graph
    left: frozenset[int]
    right: frozenset[int]
    cut_edges: tuple[tuple[int, int], ...]
    roles: dict[str, int]

    def __post_init__(self) -> None:
        if self.left & self.right:
            raise GraphError("left and right parts overlap")
        if self.left | self.right != set(range(self.graph.n)):
            raise GraphError("left and right do not partition the node set")
        for u, v in self.cut_edges:
            if not (u in self.left and v in self.right):
                raise GraphError(f"cut edge ({u}, {v}) does not cross the partition")


def bfs_distances(g: Graph, source: int) -> dict[int, int]:
    """Exact hop distances from ``source``; raises if any node is unreachable."""
    if not (0 <= source < g.n):
        raise GraphError(f"source {source} out of range")
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in g.adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    if len(dist) < g.n:
        missing = min(v for v in range(g.n) if v not in dist)
        raise GraphError(f"graph disconnected: node {missing} unreachable from {source}")
    return dist


def eccentricity(g: Graph, u: int) -> int:
    return max(bfs_distances(g, u).values())


def diameter_bruteforce(g: Graph) -> int:
    return max(eccentricity(g, u) for u in range(g.n))


def all_eccentricities(g: Graph) -> list[int]:
    return [eccentricity(g, u) for u in range(g.n)]


def bipartite_delta(gad: BipartiteGadget) -> int:
    """Largest distance between a left-part vertex and a right-part vertex."""
    best = 0
    for u in sorted(gad.left):
        dist = bfs_distances(gad.graph, u)
        best = max(best, max(dist[v] for v in gad.right))
    return best


# ---------------------------------------------------------------------------
# Generators.  All are deterministic for a fixed seed.  Structural builders
# below assign canonical labels; generate() shuffles labels with the seed so
# the min-id leader is not structurally biased.
# ---------------------------------------------------------------------------

FAMILIES = ("path", "cycle", "star", "grid", "random", "lollipop")


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    if n < 2:
        raise GraphError("star needs n >= 2")
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(n: int) -> Graph:
    """Row-major grid on n nodes, last row possibly partial."""
    cols = max(1, int(n**0.5))
    edges = []
    for k in range(n):
        if (k + 1) % cols != 0 and k + 1 < n:
            edges.append((k, k + 1))
        if k + cols < n:
            edges.append((k, k + cols))
    return Graph.from_edges(n, edges)


def lollipop_graph(n: int) -> Graph:
    """Clique on ceil(n/2) nodes with a path hanging off node m-1."""
    if n < 3:
        raise GraphError("lollipop needs n >= 3")
    m = (n + 1) // 2
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    edges += [(i, i + 1) for i in range(m - 1, n - 1)]
    return Graph.from_edges(n, edges)


def random_connected_graph(n: int, p: float, rng: random.Random) -> Graph:
    """Uniform random spanning tree (Pruefer) plus G(n, p) overlay edges.

    Pure rejection-sampled G(n, p) is essentially never connected at the
    sparse densities used in the experiment grids, so connectivity is
    guaranteed by construction instead.
    """
    if not (0.0 <= p <= 1.0):
        raise GraphError(f"edge probability {p} outside [0, 1]")
    edges = set()
    if n == 2:
        edges.add((0, 1))
    elif n > 2:
        pruefer = [rng.randrange(n) for _ in range(n - 2)]
        degree = [1] * n
        for x in pruefer:
            degree[x] += 1
        import heapq

        leaves = [v for v in range(n) if degree[v] == 1]
        heapq.heapify(leaves)
        for x in pruefer:
            leaf = heapq.heappop(leaves)
            edges.add((min(leaf, x), max(leaf, x)))
            degree[x] -= 1
            if degree[x] == 1:
                heapq.heappush(leaves, x)
        u, v = sorted(leaves[:2])
        edges.add((u, v))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < p:
                edges.add((i, j))
    return Graph.from_edges(n, edges)


def relabel(g: Graph, perm: Sequence[int]) -> Graph:
    """Return g with node i renamed to perm[i]."""
    return Graph.from_edges(g.n, [(perm[u], perm[v]) for u, v in g.edges()])


def generate(family: str, n: int, seed: int = 0, p: float | None = None) -> Graph:
    """Build a connected graph of the given family, deterministic per seed."""
    if n < 1:
        raise GraphError("n must be positive")
    rng = random.Random(f"qcongest-gen:{family}:{n}:{seed}")
    if family == "path":
        g = path_graph(n)
    elif family == "cycle":
        g = cycle_graph(n)
    elif family == "star":
        g = star_graph(n)
    elif family == "grid":
        g = grid_graph(n)
    elif family == "lollipop":
        g = lollipop_graph(n)
    elif family == "random":
        if p is None:
            raise GraphError("random family requires an edge probability p")
        g = random_connected_graph(n, p, rng)
    else:
        raise GraphError(f"unknown family {family!r} (choose from {FAMILIES})")
    perm = list(range(n))
    rng.shuffle(perm)
    return relabel(g, perm)


# ---------------------------------------------------------------------------
# Edge-list interchange format: first line "n m", then m lines "u v" with
# u < v, 0-based, emitted sorted.
# ---------------------------------------------------------------------------


def write_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in sorted(g.edges())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_edge_list(path: str | Path) -> Graph:
    text = Path(path).read_text(encoding="utf-8")
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 2:
        raise GraphError(f"{path}: expected header 'n m'")
    n, m = int(rows[0][0]), int(rows[0][1])
    if len(rows) - 1 != m:
        raise GraphError(f"{path}: header claims {m} edges, found {len(rows) - 1}")
    edges = []
    for row in rows[1:]:
        u, v = int(row[0]), int(row[1])
        if not u < v:
            raise GraphError(f"{path}: edge {u} {v} not in u<v form")
        edges.append((u, v))
    return Graph.from_edges(n, edges)
