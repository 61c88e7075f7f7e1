"""Graph core: representation, random hosts, adversaries, guest instances.

Graphs are undirected and simple, with vertices 0..n-1 and one adjacency
bitmask row per vertex.  Instances are treated as immutable once built, so
they can be shared freely across trial workers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .bitset import bit_list, bits


class Graph:
    """Undirected simple graph on vertices 0..n-1 with bitmask adjacency rows."""

    __slots__ = ("n", "adj", "m")

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = n
        self.adj: List[int] = [0] * n
        self.m = 0
        for u, v in edges:
            self.add_edge(u, v)

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ValueError("self-loops are not allowed")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
        if not (self.adj[u] >> v) & 1:
            self.adj[u] |= 1 << v
            self.adj[v] |= 1 << u
            self.m += 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> List[int]:
        return bit_list(self.adj[v])

    def row(self, v: int) -> int:
        return self.adj[v]

    def edges(self) -> Iterator[Tuple[int, int]]:
        for u in range(self.n):
            rest = self.adj[u] >> (u + 1)
            for off in bits(rest):
                yield (u, u + 1 + off)

    def copy(self) -> "Graph":
        g = Graph(self.n)
        g.adj = list(self.adj)
        g.m = self.m
        return g

    def remove_edge(self, u: int, v: int) -> None:
        if not self.has_edge(u, v):
            raise ValueError(f"edge ({u},{v}) not present")
        self.adj[u] ^= 1 << v
        self.adj[v] ^= 1 << u
        self.m -= 1

    def induced(self, vertices: Sequence[int]) -> Tuple["Graph", dict]:
        """Induced subgraph with local ids 0..k-1; returns (graph, local->global)."""
        index = {g: i for i, g in enumerate(vertices)}
        sub = Graph(len(vertices))
        for i, g in enumerate(vertices):
            for w in bits(self.adj[g]):
                j = index.get(w)
                if j is not None and j > i:
                    sub.add_edge(i, j)
        return sub, {i: g for g, i in index.items()}

    def two_coloring(self) -> Optional[List[int]]:
        """BFS 2-coloring; None if an odd cycle exists. Isolated vertices get 0."""
        color = [-1] * self.n
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            queue = [s]
            while queue:
                u = queue.pop()
                for w in bits(self.adj[u]):
                    if color[w] < 0:
                        color[w] = 1 - color[u]
                        queue.append(w)
                    elif color[w] == color[u]:
                        return None
        return color

    def power(self, k: int) -> "Graph":
        """Graph with an edge for every pair at distance 1..k."""
        pw = Graph(self.n)
        for s in range(self.n):
            reach = self.adj[s]
            frontier = self.adj[s]
            for _ in range(k - 1):
                nxt = 0
                for u in bits(frontier):
                    nxt |= self.adj[u]
                nxt &= ~reach & ~(1 << s)
                reach |= nxt
                frontier = nxt
            pw.adj[s] = reach & ~(1 << s)
        pw.m = sum(r.bit_count() for r in pw.adj) // 2
        return pw

    def max_degree(self) -> int:
        return max((r.bit_count() for r in self.adj), default=0)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class AdversarySpec:
    """Per-vertex edge-deletion adversary keeping a (1/2+gamma) degree fraction."""

    gamma: float
    strategy: str = "random-half-minus-gamma"
    seed: int = 0

    STRATEGIES = ("random-half-minus-gamma", "greedy-cut-maximizing", "bipartite-targeting")

    def __post_init__(self):
        if not (0 < self.gamma <= 0.5):
            raise ValueError("gamma must lie in (0, 1/2]")
        if self.strategy not in self.STRATEGIES:
            raise ValueError(f"unknown adversary strategy {self.strategy!r}")


@dataclass(frozen=True)
class GuestSpec:
    """Bounded-degree bipartite guest with an explicit low-bandwidth labeling."""

    m: int
    delta: int
    beta: float = 0.02
    kind: str = "path-union"
    seed: int = 0

    KINDS = ("path-union", "cycle-union", "random-bandwidth-bipartite", "grid-strip")

    def __post_init__(self):
        if self.delta < 2:
            raise ValueError("delta must be at least 2")
        if not (0 < self.beta <= 1):
            raise ValueError("beta must lie in (0, 1]")
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown guest kind {self.kind!r}")


def gen_gnp(n: int, p: float, seed: int = 0) -> Graph:
    """Seeded G(n,p): each unordered pair is an edge independently with prob p."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    g = Graph(n)
    if n < 2 or p == 0.0:
        return g
    rng = np.random.default_rng(seed)
    m = 0
    for i in range(n - 1):
        k = n - i - 1
        row = rng.random(k) < p
        hits = np.nonzero(row)[0]
        if hits.size == 0:
            continue
        packed = np.packbits(row, bitorder="little")
        g.adj[i] |= int.from_bytes(packed.tobytes(), "little") << (i + 1)
        bit_i = 1 << i
        for off in hits:
            g.adj[i + 1 + int(off)] |= bit_i
        m += int(hits.size)
    g.m = m
    return g


def _deletion_budgets(gamma_graph: Graph, gamma: float) -> List[int]:
    # budget = deg - ceil((1/2+gamma) deg): deletable edges per vertex
    out = []
    for v in range(gamma_graph.n):
        d = gamma_graph.degree(v)
        out.append(d - math.ceil((0.5 + gamma) * d))
    return out


def adversary_delete(gamma_graph: Graph, spec: AdversarySpec) -> Graph:
    """Spanning subgraph keeping deg_G(v) >= ceil((1/2+gamma) deg(v)) everywhere.

    Deletions are processed in a strategy-specific order; any deletion that
    would overdraw either endpoint's budget is skipped, so the degree
    guarantee holds unconditionally.
    """
    g = gamma_graph.copy()
    budget = _deletion_budgets(gamma_graph, spec.gamma)
    if all(b == 0 for b in budget):
        return g
    rng = random.Random(spec.seed)
    edges = list(gamma_graph.edges())

    if spec.strategy == "random-half-minus-gamma":
        rng.shuffle(edges)
        ordered = edges
    elif spec.strategy == "greedy-cut-maximizing":
        # delete across a random bisection first: starves one side of the cut
        side = [0] * gamma_graph.n
        half = rng.sample(range(gamma_graph.n), gamma_graph.n // 2)
        for v in half:
            side[v] = 1
        crossing = [e for e in edges if side[e[0]] != side[e[1]]]
        inside = [e for e in edges if side[e[0]] == side[e[1]]]
        rng.shuffle(crossing)
        rng.shuffle(inside)
        ordered = crossing + inside
    else:  # bipartite-targeting: empty the planted parts first
        side = [0] * gamma_graph.n
        half = rng.sample(range(gamma_graph.n), gamma_graph.n // 2)
        for v in half:
            side[v] = 1
        inside = [e for e in edges if side[e[0]] == side[e[1]]]
        crossing = [e for e in edges if side[e[0]] != side[e[1]]]
        rng.shuffle(inside)
        rng.shuffle(crossing)
        ordered = inside + crossing

    for u, v in ordered:
        if budget[u] > 0 and budget[v] > 0:
            g.remove_edge(u, v)
            budget[u] -= 1
            budget[v] -= 1
    return g


def verify_min_degree_ratio(host: Graph, sub: Graph, gamma: float) -> bool:
    """True iff deg_sub(v) >= (1/2+gamma) deg_host(v) for every vertex."""
    if host.n != sub.n:
        raise ValueError("host and sub must share a vertex set")
    for v in range(host.n):
        if sub.adj[v] & ~host.adj[v]:
            raise ValueError(f"vertex {v} has an edge absent from the host")
    for v in range(host.n):
        if sub.degree(v) < (0.5 + gamma) * host.degree(v):
            return False
    return True


def bandwidth_of_labeling(h: Graph, order: Sequence[int]) -> int:
    """Max |pos(u)-pos(v)| over edges uv; 0 for edgeless graphs."""
    if sorted(order) != list(range(h.n)):
        raise ValueError("order must be a permutation of the vertices")
    pos = [0] * h.n
    for i, v in enumerate(order):
        pos[v] = i
    best = 0
    for u, v in h.edges():
        d = abs(pos[u] - pos[v])
        if d > best:
            best = d
    return best


def _gen_path_union(m: int) -> Graph:
    g = Graph(m)
    seg = 500
    for start in range(0, m, seg):
        end = min(start + seg, m)
        for v in range(start, end - 1):
            g.add_edge(v, v + 1)
    return g


def _zigzag_cycle_order(length: int) -> List[int]:
    # fold the cycle so consecutive labels are at cycle distance <= 2
    order = [0]
    lo, hi = 1, length - 1
    while lo <= hi:
        order.append(lo)
        lo += 1
        if lo <= hi:
            order.append(hi)
            hi -= 1
    return order


def _gen_cycle_union(m: int, rng: random.Random) -> Graph:
    if m < 4 or m % 2 != 0:
        raise ValueError("cycle-union needs an even vertex count m >= 4 (odd cycles are not bipartite)")
    lengths: List[int] = []
    rest = m
    while rest > 0:
        if rest <= 10:
            lengths.append(rest)
            rest = 0
        else:
            pick = rng.choice([4, 6, 8, 10])
            if rest - pick in (2,):
                pick += 2
            lengths.append(pick)
            rest -= pick
    g = Graph(m)
    base = 0
    for length in lengths:
        ring = _zigzag_cycle_order(length)
        # labels base..base+length-1 walk the cycle in folded order
        label_of = [0] * length
        for lab, cyc in enumerate(ring):
            label_of[cyc] = base + lab
        for k in range(length):
            g.add_edge(label_of[k], label_of[(k + 1) % length])
        base += length
    return g


def _gen_random_banded(m: int, delta: int, b: int, rng: random.Random) -> Graph:
    g = Graph(m)
    if m < 2:
        return g
    deg = [0] * m
    attempts = 4 * m * delta
    for _ in range(attempts):
        u = rng.randrange(m)
        lo = max(0, u - b)
        hi = min(m - 1, u + b)
        v = rng.randint(lo, hi)
        if v == u or (v - u) % 2 == 0:
            continue  # opposite label parity keeps the graph bipartite
        if deg[u] >= delta or deg[v] >= delta or g.has_edge(u, v):
            continue
        g.add_edge(u, v)
        deg[u] += 1
        deg[v] += 1
    return g


def _gen_grid_strip(m: int, delta: int) -> Graph:
    if delta < 3:
        raise ValueError("grid-strip needs delta >= 3")
    if m % 2 != 0 or m < 4:
        raise ValueError("grid-strip needs an even vertex count m >= 4")
    cols = m // 2
    g = Graph(m)
    # label = 2*col + row: column-major, bandwidth 2
    for c in range(cols):
        g.add_edge(2 * c, 2 * c + 1)
        if c + 1 < cols:
            g.add_edge(2 * c, 2 * (c + 1))
            g.add_edge(2 * c + 1, 2 * (c + 1) + 1)
    return g


def gen_guest(spec: GuestSpec) -> Tuple[Graph, List[int]]:
    """Bipartite guest with Delta(H) <= spec.delta and bw <= beta*m; labeling emitted.

    Vertices are generated in label order, so the emitted labeling is the
    identity permutation.
    """
    rng = random.Random(spec.seed)
    if spec.kind == "path-union":
        g = _gen_path_union(spec.m)
    elif spec.kind == "cycle-union":
        g = _gen_cycle_union(spec.m, rng)
    elif spec.kind == "grid-strip":
        g = _gen_grid_strip(spec.m, spec.delta)
    else:
        b = max(1, math.floor(spec.beta * spec.m))
        g = _gen_random_banded(spec.m, spec.delta, b, rng)
    order = list(range(spec.m))
    if g.max_degree() > spec.delta:
        raise AssertionError("generator exceeded the declared max degree")
    # structural kinds have constant bandwidth regardless of beta
    structural = {"path-union": 1, "cycle-union": 2, "grid-strip": 2}
    limit = max(spec.beta * spec.m, structural.get(spec.kind, 1))
    if bandwidth_of_labeling(g, order) > limit:
        raise AssertionError("generator exceeded the declared bandwidth")
    if g.two_coloring() is None:
        raise AssertionError("generator produced a non-bipartite guest")
    return g, order


def write_edgelist(g: Graph) -> str:
    """Edge-list text: first line "n m", then one "u v" line per edge, u < v."""
    lines = [f"{g.n} {g.m}"]
    for u, v in g.edges():
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def read_edgelist(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m = (int(x) for x in lines[0].split())
    g = Graph(n)
    for ln in lines[1 : m + 1]:
        u, v = (int(x) for x in ln.split())
        if not u < v:
            raise ValueError("edge lines must satisfy u < v")
        g.add_edge(u, v)
    if g.m != m:
        raise ValueError("edge count mismatch in edge-list input")
    return g


def write_labeling(order: Sequence[int]) -> str:
    return " ".join(str(v) for v in order) + "\n"


def read_labeling(text: str) -> List[int]:
    return [int(x) for x in text.split()]
