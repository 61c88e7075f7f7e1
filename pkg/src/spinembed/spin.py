"""Ladder and spin-graph backbones plus homomorphism checking.

The spin graph on parameters (r, t) has big-role vertices u_i, v_i, connecting
vertices c_{i,j}, c'_{i,j} and balancing vertices b_{i,j}, b'_{i,j} with
i in [r], j in [2t].  Within each block i the low halves (j <= t) and high
halves (j > t) of the c/c' and b/b' families form complete bipartite bundles,
every c and b vertex is joined to v_i, the primed balancing halves are joined
across (b'_low ~ b'_high), and consecutive blocks are tied together by the
connector bundles c_{i-1,high} ~ c'_{i,low} and c'_{i-1,high} ~ c_{i,low}.

Note on the connectors: the source construction lists one inter-block
connector term twice.  Emitting a single direction breaks the guest
partition's boundary tables (edges between consecutive boundary zones of
opposite parity would have no image), so both directions are materialized
here; the guest-partition walk uses both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Tuple

from .graphs import Graph

Role = Tuple[str, int, int]  # (kind, i, j); kinds: u v c cp b bp; j = 0 for u/v

ROLE_KINDS = ("u", "v", "c", "cp", "b", "bp")


def ladder(r: int) -> Graph:
    """Bipartite ladder on u_1..u_r, v_1..v_r with edges u_i v_j for |i-j| <= 1.

    Vertices: u_i -> i-1, v_j -> r + j - 1.  Has exactly 3r-2 edges.
    """
    if r < 1:
        raise ValueError("ladder needs r >= 1")
    g = Graph(2 * r)
    for i in range(1, r + 1):
        for j in range(max(1, i - 1), min(r, i + 1) + 1):
            g.add_edge(i - 1, r + j - 1)
    return g


@dataclass
class SpinGraph:
    """Spin backbone: graph plus total role lookup in canonical vertex order."""

    r: int
    t: int
    graph: Graph
    roles: List[Role]
    index: Dict[Role, int]

    @property
    def n(self) -> int:
        return self.graph.n

    def vertex(self, kind: str, i: int, j: int = 0) -> int:
        return self.index[(kind, i, j)]

    def role_of(self, v: int) -> Role:
        return self.roles[v]

    def has_edge(self, a: Role, b: Role) -> bool:
        return self.graph.has_edge(self.index[a], self.index[b])


def _canonical_roles(r: int, t: int) -> List[Role]:
    roles: List[Role] = []
    roles += [("u", i, 0) for i in range(1, r + 1)]
    roles += [("v", i, 0) for i in range(1, r + 1)]
    for kind in ("c", "cp", "b", "bp"):
        roles += [(kind, i, j) for i in range(1, r + 1) for j in range(1, 2 * t + 1)]
    return roles


def spin_graph(r: int, t: int) -> SpinGraph:
    """Materialize the spin graph S(r, t); t must be a positive even integer."""
    if r < 1:
        raise ValueError("spin graph needs r >= 1")
    if t < 2 or t % 2 != 0:
        raise ValueError("spin graph needs an even t >= 2")
    roles = _canonical_roles(r, t)
    index = {role: v for v, role in enumerate(roles)}
    g = Graph(len(roles))
    low = range(1, t + 1)
    high = range(t + 1, 2 * t + 1)

    def add(a: Role, b: Role) -> None:
        g.add_edge(index[a], index[b])

    for i in range(1, r + 1):
        add(("u", i, 0), ("v", i, 0))
        for j in range(1, 2 * t + 1):
            add(("b", i, j), ("v", i, 0))
            add(("c", i, j), ("v", i, 0))
        for k in low:
            for kp in low:
                add(("b", i, k), ("bp", i, kp))
                add(("c", i, k), ("cp", i, kp))
        for l in high:
            for lp in high:
                add(("b", i, l), ("bp", i, lp))
                add(("c", i, l), ("cp", i, lp))
        for k in low:
            for l in high:
                add(("bp", i, k), ("bp", i, l))
    for i in range(2, r + 1):
        for l in high:
            for k in low:
                add(("c", i - 1, l), ("cp", i, k))
                add(("cp", i - 1, l), ("c", i, k))
    return SpinGraph(r=r, t=t, graph=g, roles=roles, index=index)


def roles_adjacent(a: Role, b: Role, r: int, t: int) -> bool:
    """Spin-graph adjacency straight from the edge-family rules.

    Independent of the materialized constructor, so the two can cross-check
    each other; also serves partition sizes whose spin graph is too large to
    build explicitly.
    """
    if a == b:
        return False
    (k1, i1, j1), (k2, i2, j2) = a, b
    if k1 == k2:
        if k1 == "bp":  # primed balancing halves are joined across
            return i1 == i2 and (j1 <= t) != (j2 <= t)
        return False
    kinds = {k1, k2}
    if kinds == {"u", "v"}:
        return i1 == i2
    if kinds in ({"v", "b"}, {"v", "c"}):
        return i1 == i2
    if kinds == {"b", "bp"}:
        return i1 == i2 and (j1 <= t) == (j2 <= t)
    if kinds == {"c", "cp"}:
        if i1 == i2:
            return (j1 <= t) == (j2 <= t)
        cj, ci = (j1, i1) if k1 == "c" else (j2, i2)
        pj, pi = (j1, i1) if k1 == "cp" else (j2, i2)
        if ci + 1 == pi:  # c high of a block meets cp low of the next
            return cj > t and pj <= t
        if pi + 1 == ci:  # cp high of a block meets c low of the next
            return pj > t and cj <= t
    return False


def is_role_homomorphism(guest: Graph, h: Mapping[int, Role], r: int, t: int) -> bool:
    """True iff every guest edge maps to a spin-graph edge under the role rules."""
    for x in range(guest.n):
        if x not in h:
            raise ValueError(f"homomorphism is partial: vertex {x} unmapped")
    for x, y in guest.edges():
        if not roles_adjacent(h[x], h[y], r, t):
            return False
    return True


def is_homomorphism(guest: Graph, target: Graph, h: Mapping[int, int]) -> bool:
    """True iff every guest edge xy maps to a target edge h(x)h(y)."""
    for x in range(guest.n):
        if x not in h:
            raise ValueError(f"homomorphism is partial: vertex {x} unmapped")
    for x, y in guest.edges():
        if not target.has_edge(h[x], h[y]):
            return False
    return True


def write_spin(s: SpinGraph) -> str:
    """Edge-list text followed by one "kind i j" role line per vertex."""
    from .graphs import write_edgelist

    out = [write_edgelist(s.graph).rstrip("\n")]
    for kind, i, j in s.roles:
        out.append(f"{kind} {i} {j}")
    return "\n".join(out) + "\n"


def read_spin(text: str) -> SpinGraph:
    from .graphs import read_edgelist

    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m = (int(x) for x in lines[0].split())
    graph = read_edgelist("\n".join(lines[: m + 1]) + "\n")
    roles: List[Role] = []
    for ln in lines[m + 1 : m + 1 + n]:
        kind, i, j = ln.split()
        roles.append((kind, int(i), int(j)))
    r = max(i for _, i, _ in roles)
    t = max(j for _, _, j in roles) // 2
    index = {role: v for v, role in enumerate(roles)}
    return SpinGraph(r=r, t=t, graph=graph, roles=roles, index=index)
