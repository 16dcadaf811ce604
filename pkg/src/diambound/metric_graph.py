"""Finite metric graphs with loops and multi-edges.

Lengths may be floats or exact ``Fraction``s; every operation keeps the
arithmetic type of its input.  Text format::

    V 2
    E 0 1 1
    E 0 1 2.5
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable

Edge = tuple[int, int, Real]


class HypothesisViolation(ValueError):
    pass


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class MetricGraph:
    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.vertex_count < 0:
            raise ValueError("negative vertex count")
        for u, v, length in self.edges:
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise ValueError(f"edge ({u}, {v}) has an endpoint out of range")
            if not length > 0:
                raise ValueError(f"edge ({u}, {v}) has nonpositive length {length}")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.vertex_count
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg


def total_length(G: MetricGraph):
    return sum((e[2] for e in G.edges), start=0)


def component_count(G: MetricGraph) -> int:
    parent = list(range(G.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = G.vertex_count
    for u, v, _ in G.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps


def is_connected(G: MetricGraph) -> bool:
    return component_count(G) <= 1


def cycle_rank(G: MetricGraph) -> int:
    """First Betti number ``E - V + components``."""
    return G.edge_count - G.vertex_count + component_count(G)


def _adjacency(G: MetricGraph) -> list[list[tuple[int, int, Real]]]:
    adj: list[list[tuple[int, int, Real]]] = [[] for _ in range(G.vertex_count)]
    for k, (u, v, length) in enumerate(G.edges):
        adj[u].append((v, k, length))
        if u != v:
            adj[v].append((u, k, length))
    return adj


def _dijkstra_avoiding(adj, source: int, target: int, banned: int):
    dist = {source: 0}
    heap = [(0, source)]
    seen = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in seen:
            continue
        if x == target:
            return d
        seen.add(x)
        for y, k, length in adj[x]:
            if k == banned or y in seen:
                continue
            nd = d + length
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return None


def girth(G: MetricGraph):
    """Length of the shortest simple closed curve; ``math.inf`` for forests.

    Every shortest cycle through edge ``e = uv`` is ``e`` plus a shortest
    ``u``-``v`` path avoiding ``e``, so one Dijkstra run per edge is exact.
    """
    adj = _adjacency(G)
    best = math.inf
    for k, (u, v, length) in enumerate(G.edges):
        if u == v:
            cand = length
        else:
            d = _dijkstra_avoiding(adj, u, v, k)
            if d is None:
                continue
            cand = d + length
        if cand < best:
            best = cand
    return best


@dataclass(frozen=True)
class GraphCertificate:
    total_length: Real
    girth: Real
    rank: int
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.rank <= self.bound


def rank_bound_certificate(G: MetricGraph, N: Real, eps: Real) -> GraphCertificate:
    """Certify ``rank <= 32 N^2 / eps^2`` for a graph shorter than ``N`` with girth at least ``eps``.

    The bound is compared as an exact rational.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    L = total_length(G)
    if not L < N:
        raise HypothesisViolation(f"total length {L} is not below N = {N}")
    g = girth(G)
    if g < eps:
        raise HypothesisViolation(f"girth {g} is below eps = {eps}")
    bound = 32 * Fraction(N) ** 2 / Fraction(eps) ** 2
    return GraphCertificate(L, g, cycle_rank(G), bound)


def _compact(vertex_count: int, edges: Iterable[Edge], keep: Iterable[int]) -> MetricGraph:
    index = {v: i for i, v in enumerate(sorted(keep))}
    return MetricGraph(len(index), tuple((index[u], index[v], ln) for u, v, ln in edges))


def coarse_subdivision(G: MetricGraph) -> MetricGraph:
    """Amalgamate edges across bivalent vertices until every valence is at least 3.

    For a closed connected graph of rank ``R >= 2`` the result has at most
    ``3 (R - 1)`` edges and the same rank and total length.
    """
    deg = G.degrees()
    if any(d == 1 for d in deg):
        raise HypothesisViolation("graph has a univalent vertex")
    if not is_connected(G):
        raise HypothesisViolation("graph is not connected")
    if cycle_rank(G) < 2:
        raise HypothesisViolation("graph has rank below 2")
    edges: list[Edge | None] = list(G.edges)
    alive = set(range(G.vertex_count))
    inc: dict[int, set[int]] = {v: set() for v in alive}
    for k, (u, v, _) in enumerate(edges):
        inc[u].add(k)
        inc[v].add(k)
    # isolated vertices cannot occur in a connected graph of rank >= 2
    stack = [v for v in alive if deg[v] == 2]
    while stack:
        x = stack.pop()
        if x not in alive or deg[x] != 2:
            continue
        k1, k2 = sorted(inc[x])
        u1, v1, l1 = edges[k1]
        u2, v2, l2 = edges[k2]
        a = v1 if u1 == x else u1
        b = v2 if u2 == x else u2
        edges[k1] = (a, b, l1 + l2)
        edges[k2] = None
        inc[b].discard(k2)
        inc[b].add(k1)
        alive.discard(x)
        del inc[x]
    kept = [e for e in edges if e is not None]
    return _compact(G.vertex_count, kept, alive)


def good_subgraph(G: MetricGraph) -> MetricGraph:
    """Largest closed subgraph: prune univalent vertices, then drop isolated ones."""
    deg = G.degrees()
    alive_edges = set(range(G.edge_count))
    inc: list[set[int]] = [set() for _ in range(G.vertex_count)]
    for k, (u, v, _) in enumerate(G.edges):
        inc[u].add(k)
        inc[v].add(k)
    stack = [v for v in range(G.vertex_count) if deg[v] == 1]
    while stack:
        x = stack.pop()
        if deg[x] != 1:
            continue
        (k,) = inc[x]
        u, v, _ = G.edges[k]
        y = v if u == x else u
        alive_edges.discard(k)
        inc[x].clear()
        inc[y].discard(k)
        deg[x] = 0
        deg[y] -= 1
        if deg[y] == 1:
            stack.append(y)
    kept = [G.edges[k] for k in sorted(alive_edges)]
    return _compact(G.vertex_count, kept, [v for v in range(G.vertex_count) if deg[v] > 0])


def bridges(G: MetricGraph) -> set[int]:
    """Indices of edges lying on no cycle (removal increases component count)."""
    base = component_count(G)
    out = set()
    for k in range(G.edge_count):
        H = MetricGraph(G.vertex_count, G.edges[:k] + G.edges[k + 1 :])
        if component_count(H) > base:
            out.add(k)
    return out


# -- text format -------------------------------------------------------------


def _parse_length(tok: str) -> Real:
    try:
        return Fraction(tok) if ("/" in tok or tok.lstrip("-").isdigit()) else float(tok)
    except ValueError:
        return float(tok)


def parse_graph(text: str) -> MetricGraph:
    count = None
    edges: list[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "V" and len(parts) == 2:
                if count is not None:
                    raise GraphFormatError("repeated V line", lineno)
                count = int(parts[1])
            elif parts[0] == "E" and len(parts) == 4:
                if count is None:
                    raise GraphFormatError("E before V", lineno)
                u, v, ln = int(parts[1]), int(parts[2]), _parse_length(parts[3])
                if not (0 <= u < count and 0 <= v < count):
                    raise GraphFormatError(f"vertex out of range in {line!r}", lineno)
                if not ln > 0:
                    raise GraphFormatError("edge length must be positive", lineno)
                edges.append((u, v, ln))
            else:
                raise GraphFormatError(f"unrecognized line {line!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(str(exc), lineno) from None
    if count is None:
        raise GraphFormatError("missing V line", 0)
    return MetricGraph(count, tuple(edges))


def format_graph(G: MetricGraph) -> str:
    lines = [f"V {G.vertex_count}"]
    lines += [f"E {u} {v} {ln}" for u, v, ln in G.edges]
    return "\n".join(lines) + "\n"


# -- generators --------------------------------------------------------------


def random_graph(
    rng: random.Random, max_vertices: int = 8, max_edges: int = 14, loops: bool = True
) -> MetricGraph:
    n = rng.randint(1, max_vertices)
    m = rng.randint(0, max_edges)
    edges = []
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n) if loops else rng.choice([x for x in range(n) if x != u] or [u])
        edges.append((u, v, Fraction(rng.randint(1, 20), rng.randint(1, 5))))
    return MetricGraph(n, tuple(edges))


def random_closed_connected_graph(rng: random.Random, max_vertices: int = 10) -> MetricGraph:
    """Connected graph with no univalent vertex and rank at least 2, with bivalent chains."""
    while True:
        n = rng.randint(1, max_vertices)
        # random spanning tree, then extra edges
        edges = [(rng.randrange(v), v, Fraction(rng.randint(1, 9))) for v in range(1, n)]
        for _ in range(rng.randint(2, n + 3)):
            edges.append((rng.randrange(n), rng.randrange(n), Fraction(rng.randint(1, 9))))
        G = good_subgraph(MetricGraph(n, tuple(edges)))
        if G.vertex_count and is_connected(G) and cycle_rank(G) >= 2:
            return subdivide(G, rng, rng.randint(0, 6))


def subdivide(G: MetricGraph, rng: random.Random, times: int) -> MetricGraph:
    """Insert ``times`` bivalent vertices at random edge midpoints."""
    n = G.vertex_count
    edges = list(G.edges)
    for _ in range(times):
        k = rng.randrange(len(edges))
        u, v, ln = edges[k]
        half = Fraction(ln) / 2 if isinstance(ln, int) else ln / 2
        edges[k] = (u, n, half)
        edges.append((n, v, ln - half))
        n += 1
    return MetricGraph(n, tuple(edges))
