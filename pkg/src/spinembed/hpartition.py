"""Guest-side partition pipeline.

Cuts the guest along its bandwidth order into blocks, maps each block onto a
six-vertex "lolly" (an edge with a pendant 5-cycle) so the two color classes
land mostly on the edge and imbalance is burned off by walking the 5-cycle,
reroutes the boundary zones between blocks through connecting roles, splits
the small classes by a degree fingerprint, and repairs vertices whose whole
neighborhood sits in the big class.  The result is a homomorphism into a
spin graph together with the class lists and witness data.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .bitset import bits, mask_of
from .graphs import Graph, bandwidth_of_labeling
from .spin import Role, SpinGraph, is_homomorphism, is_role_homomorphism

# z0 - z1 edge plus the 5-cycle z1 z2 z3 z4 z5 z1
LOLLY_EDGES = ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 1))


def lolly_target() -> Graph:
    """The six-vertex, six-edge target: an edge carrying a pendant 5-cycle."""
    return Graph(6, LOLLY_EDGES)


@dataclass
class LollyLayout:
    ell: int
    zone: int  # buffer-zone width floor(m/ell^2)
    chunks: List[Tuple[int, int]]  # position ranges, W-part plus trailing X zones
    x_zones: List[List[Tuple[int, int]]]  # per chunk: five trailing zones


def lolly_ell(eta_bar: float) -> int:
    """Smallest ell >= 6 with 5/ell < eta_bar."""
    if eta_bar <= 0:
        raise ValueError("eta_bar must be positive")
    if 5.0 / 6.0 < eta_bar:
        return 6
    return math.floor(5.0 / eta_bar) + 1


def lolly_layout(m: int, eta_bar: float) -> LollyLayout:
    ell = lolly_ell(eta_bar)
    zone = (m // ell) // ell  # floor(m / ell^2) up to the chunk remainder
    zone = m // (ell * ell)
    chunk = m // ell
    if chunk < 5 * zone + 1:
        raise ValueError(f"block of size {m} cannot host ell={ell} chunks with zone width {zone}")
    chunks = []
    x_zones = []
    for q in range(ell):
        start = q * chunk
        end = (q + 1) * chunk if q < ell - 1 else m
        chunks.append((start, end))
        zs = []
        for k in range(5, 0, -1):
            zs.append((end - k * zone, end - (k - 1) * zone))
        x_zones.append(zs)
    return LollyLayout(ell=ell, zone=zone, chunks=chunks, x_zones=x_zones)


# when consecutive chunks flip orientation, the buffer zones walk the 5-cycle;
# row = color currently on z1 / z0, columns = zones 1..5
_FLIP_ROW_Z1 = (1, 3, 3, 5, 5)
_FLIP_ROW_Z0 = (2, 2, 4, 4, 1)


def lolly_homomorphism(
    hbar: Graph,
    coloring: Sequence[int],
    order: Sequence[int],
    eta_bar: float,
) -> Dict[int, int]:
    """Homomorphism of a bipartite block into the lolly target.

    The block is cut into ell chunks along the order; each chunk is embedded
    normally or inverted (greedily equalizing the z0/z1 preimages, with the
    first and last chunks forced normal), and the five trailing buffer zones
    of a chunk walk the 5-cycle whenever the orientation flips.  Guarantees:
    preimages of z0/z1 within m/2 - 5*eta_bar*m .. m/2 + eta_bar*m, each of
    z2..z5 at most eta_bar*m, and the first/last zone-width vertices of each
    color class map to their own side of the z0 z1 edge.
    """
    m = hbar.n
    if sorted(order) != list(range(m)):
        raise ValueError("order must be a permutation of the block's vertices")
    layout = lolly_layout(m, eta_bar)
    bw = bandwidth_of_labeling(hbar, order)
    if bw > layout.zone and hbar.m > 0:
        raise ValueError(
            f"block bandwidth {bw} exceeds the buffer width {layout.zone} for ell={layout.ell}"
        )
    ell = layout.ell
    in_x = [False] * m
    for zs in layout.x_zones:
        for a, b in zs:
            for pos in range(a, b):
                in_x[pos] = True

    # chunk color counts over the W parts only
    counts = []
    for q in range(ell):
        a = b = 0
        lo, hi = layout.chunks[q]
        for pos in range(lo, hi):
            if in_x[pos]:
                continue
            if coloring[order[pos]] == 0:
                a += 1
            else:
                b += 1
        counts.append((a, b))

    phi = [0] * ell
    diff = counts[0][0] - counts[0][1]
    for q in range(1, ell - 1):
        delta = counts[q][0] - counts[q][1]
        if abs(diff - delta) < abs(diff + delta):
            phi[q] = 1
            diff -= delta
        else:
            diff += delta
    diff += counts[ell - 1][0] - counts[ell - 1][1]

    h: Dict[int, int] = {}
    for q in range(ell):
        lo, hi = layout.chunks[q]
        for pos in range(lo, hi):
            if in_x[pos]:
                continue
            v = order[pos]
            h[v] = coloring[v] ^ phi[q]
        phi_next = phi[q + 1] if q + 1 < ell else phi[q]
        if phi[q] == phi_next:
            for a, b in layout.x_zones[q]:
                for pos in range(a, b):
                    v = order[pos]
                    h[v] = coloring[v] ^ phi[q]
        else:
            color_on_z1 = 1 ^ phi[q]
            for k, (a, b) in enumerate(layout.x_zones[q], start=1):
                for pos in range(a, b):
                    v = order[pos]
                    if coloring[v] == color_on_z1:
                        h[v] = _FLIP_ROW_Z1[k - 1]
                    else:
                        h[v] = _FLIP_ROW_Z0[k - 1]

    target = lolly_target()
    if not is_homomorphism(hbar, target, h):
        raise RuntimeError("lolly construction produced a non-homomorphism (internal bug)")
    return h


def lolly_bounds_report(
    hbar: Graph,
    coloring: Sequence[int],
    order: Sequence[int],
    eta_bar: float,
    h: Dict[int, int],
    slack: int = 0,
) -> dict:
    """Check the three preimage guarantees of the lolly construction."""
    m = hbar.n
    layout = lolly_layout(m, eta_bar)
    sizes = [0] * 6
    for v, z in h.items():
        sizes[z] += 1
    lo = m / 2 - 5 * eta_bar * m - slack
    hi = m / 2 + eta_bar * m + slack
    main_ok = all(lo <= sizes[j] <= hi for j in (0, 1))
    ring_ok = all(sizes[k] <= eta_bar * m + slack for k in (2, 3, 4, 5))
    zone = layout.zone
    boundary_ok = True
    for pos in list(range(zone)) + list(range(m - zone, m)):
        v = order[pos]
        if h[v] != coloring[v]:
            boundary_ok = False
    return {
        "sizes": sizes,
        "main_classes_ok": main_ok,
        "ring_classes_ok": ring_ok,
        "boundary_ok": boundary_ok,
        "all_ok": main_ok and ring_ok and boundary_ok,
        "eta_bar": eta_bar,
        "ell": layout.ell,
        "slack": slack,
    }


def equitable_coloring(g: Graph, colors: int) -> List[int]:
    """Proper coloring with class sizes differing by at most one.

    Greedy assignment into the smallest feasible class, then move/relay
    repair between oversized and undersized classes, with randomized
    restarts.  Raises when the retry budget is exhausted, never returns a
    silently unbalanced coloring.
    """
    if colors < g.max_degree() + 1:
        raise ValueError("need at least max degree + 1 colors")
    n = g.n
    if n == 0:
        return []

    for attempt in range(64):
        rng = random.Random(attempt)
        vertices = list(range(n))
        rng.shuffle(vertices)
        color = [-1] * n
        sizes = [0] * colors
        for v in vertices:
            used = set()
            for w in bits(g.adj[v]):
                if color[w] >= 0:
                    used.add(color[w])
            c = min((c for c in range(colors) if c not in used), key=lambda c: (sizes[c], c))
            color[v] = c
            sizes[c] += 1

        def feasible(v: int, c: int) -> bool:
            return all(color[w] != c for w in bits(g.adj[v]))

        stuck = False
        while max(sizes) - min(sizes) > 1 and not stuck:
            big = max(range(colors), key=lambda c: (sizes[c], c))
            small = min(range(colors), key=lambda c: (sizes[c], -c))
            movers = [v for v in range(n) if color[v] == big]
            rng.shuffle(movers)
            moved = False
            for v in movers:
                if feasible(v, small):
                    color[v], sizes[big], sizes[small] = small, sizes[big] - 1, sizes[small] + 1
                    moved = True
                    break
            if moved:
                continue
            # relay through an intermediate class
            for v in movers:
                mids = [c for c in range(colors) if c not in (big, small) and feasible(v, c)]
                relayed = False
                for mid in mids:
                    for u in (u for u in range(n) if color[u] == mid and u != v):
                        if feasible(u, small):
                            color[v] = mid
                            color[u] = small
                            sizes[big] -= 1
                            sizes[small] += 1
                            relayed = True
                            break
                    if relayed:
                        break
                if relayed:
                    moved = True
                    break
            if not moved:
                stuck = True
        if max(sizes) - min(sizes) <= 1:
            return color
    raise RuntimeError("equitable coloring retries exhausted")


@dataclass
class BlockLayout:
    r: int
    w: int  # boundary-zone width
    blocks: List[Tuple[int, int]]  # position ranges of the raw blocks
    s_parts: List[Tuple[int, int]]  # block minus its four rerouted zones
    t_zones: List[List[Tuple[int, int]]]  # per block < r-1: zones 1..4


def block_layout(m: int, r: int, w: int) -> BlockLayout:
    if r < 1:
        raise ValueError("need r >= 1")
    mb = m // r
    if mb < 6 * w + 1 and r > 1:
        raise ValueError(f"blocks of size {mb} are too small for boundary zones of width {w}")
    blocks = []
    for i in range(r):
        start = i * mb
        end = (i + 1) * mb if i < r - 1 else m
        blocks.append((start, end))
    s_parts = []
    t_zones: List[List[Tuple[int, int]]] = []
    for i, (start, end) in enumerate(blocks):
        if i < r - 1:
            s_parts.append((start, end - 4 * w))
            t_zones.append([(end - (5 - k) * w, end - (4 - k) * w) for k in range(1, 5)])
        else:
            s_parts.append((start, end))
    return BlockLayout(r=r, w=w, blocks=blocks, s_parts=s_parts, t_zones=t_zones)


# intermediate labels: ("z", block, 0..5) or ("q", block, 2..5)
_ZKIND_TO_ROLE = {2: ("b", "low"), 3: ("bp", "low"), 4: ("bp", "high"), 5: ("b", "high")}
_QKIND_TO_ROLE = {2: ("c", "low"), 3: ("cp", "low"), 4: ("c", "high"), 5: ("cp", "high")}


def spin_t_formula(delta: int) -> int:
    return (delta + 1) ** 3 * (delta**3 + 1)


@dataclass
class HPartition:
    """Role homomorphism of a guest into a spin graph plus class witnesses.

    `h` maps guest vertices to spin roles; for large formula widths the spin
    graph itself is never materialized (adjacency follows the role rules).
    """

    h: Dict[int, Role]
    r: int
    t: int  # fingerprint index space
    t_spin: int  # spin width used for role indices (t rounded up to even)
    eta: float
    delta: int
    m: int
    u_classes: List[List[int]]
    v_classes: List[List[int]]
    c_classes: Dict[Tuple[int, int], List[int]]
    cp_classes: Dict[Tuple[int, int], List[int]]
    b_classes: Dict[Tuple[int, int], List[int]]
    bp_classes: Dict[Tuple[int, int], List[int]]
    x_sets: List[List[int]]
    diagnostics: dict = field(default_factory=dict)

    def class_of(self, kind: str, i: int, j: int = 0) -> List[int]:
        if kind == "u":
            return self.u_classes[i - 1]
        if kind == "v":
            return self.v_classes[i - 1]
        return {"c": self.c_classes, "cp": self.cp_classes, "b": self.b_classes, "bp": self.bp_classes}[
            kind
        ].get((i, j), [])

    def vertex_map(self, spin: SpinGraph) -> Dict[int, int]:
        """Translate the role homomorphism into vertex ids of a built spin graph."""
        return {v: spin.index[role] for v, role in self.h.items()}

    def to_json(self) -> dict:
        roles: Dict[str, List[int]] = {}
        for v in sorted(self.h):
            kind, i, j = self.h[v]
            roles.setdefault(f"{kind} {i} {j}", []).append(v)
        return {
            "r": self.r,
            "t": self.t,
            "t_spin": self.t_spin,
            "eta": self.eta,
            "delta": self.delta,
            "m": self.m,
            "classes": roles,
        }


def _derive_eta_bar(m_bar_min: int, w: int, ell_cap: int = 48) -> Tuple[float, int]:
    ell = int(math.isqrt(max(m_bar_min, 0) // max(w, 1)))
    ell = min(ell, ell_cap)
    if ell < 6:
        raise ValueError(
            f"blocks of size {m_bar_min} cannot host buffer zones of width {w}: "
            "bandwidth too large for this r"
        )
    return 5.0 / (ell - 0.5), ell


def partition_H(
    hgraph: Graph,
    order: Sequence[int],
    r: int,
    eta: float,
    delta: int,
    t_override: Optional[int] = None,
    eta_bar: Optional[float] = None,
) -> HPartition:
    """Full guest partition: blocks, lolly per block, boundary rerouting,
    fingerprint splitting, and degree repair.

    Without `t_override` the fingerprint index space is the formula value
    (delta+1)^3 (delta^3+1) and classes are indexed by the literal
    fingerprint.  With an override the occurring fingerprints of each class
    bundle are compressed injectively into [t_override]; degree triples are
    kept apart and members of a merged class are re-separated by a greedy
    proper coloring of the cube graph, so the class guarantees survive.
    Raises if more classes occur than the override allows.
    """
    m = hgraph.n
    if sorted(order) != list(range(m)):
        raise ValueError("order must be a permutation of the guest's vertices")
    coloring = hgraph.two_coloring()
    if coloring is None:
        raise ValueError("guest must be bipartite")
    if hgraph.max_degree() > delta:
        raise ValueError("guest exceeds the declared max degree")
    bw = bandwidth_of_labeling(hgraph, order)
    w = max(1, bw)
    layout = block_layout(m, r, w)

    m_bar_min = min(e - s for s, e in layout.s_parts)
    if eta_bar is None:
        eta_bar, ell = _derive_eta_bar(m_bar_min, w)
    else:
        ell = lolly_ell(eta_bar)

    t = t_override if t_override is not None else spin_t_formula(delta)
    if t < 1:
        raise ValueError("t override must be positive")
    t_spin = max(t + (t % 2), 2)

    pos_of = [0] * m
    for idx, v in enumerate(order):
        pos_of[v] = idx

    # first + second round: intermediate labels
    inter: Dict[int, Tuple[str, int, int]] = {}
    for bi, (s_lo, s_hi) in enumerate(layout.s_parts):
        block_vertices = [order[p] for p in range(s_lo, s_hi)]
        sub, to_global = hgraph.induced(block_vertices)
        local_order = list(range(len(block_vertices)))
        local_coloring = [coloring[to_global[i]] for i in range(len(block_vertices))]
        zmap = lolly_homomorphism(sub, local_coloring, local_order, eta_bar)
        for local, z in zmap.items():
            inter[to_global[local]] = ("z", bi, z)
    for bi, zones in enumerate(layout.t_zones):
        for k, (a, b) in enumerate(zones, start=1):
            for p in range(a, b):
                v = order[p]
                if coloring[v] == 0:
                    inter[v] = ("q", bi, 4) if k <= 2 else ("q", bi + 1, 2)
                else:
                    inter[v] = (
                        ("z", bi, 1) if k == 1 else ("q", bi, 5) if k == 2 else ("q", bi + 1, 3) if k == 3 else ("z", bi + 1, 1)
                    )

    # repair vertices whose whole neighborhood was mapped to the big v-class
    v_masks = [0] * r
    for v, (kind, bi, z) in inter.items():
        if kind == "z" and z == 1:
            v_masks[bi] |= 1 << v
    repaired = 0
    for v in list(inter):
        kind, bi, z = inter[v]
        if (kind, z) in (("z", 2), ("z", 5), ("q", 2), ("q", 4)):
            d = hgraph.degree(v)
            if d == delta and (hgraph.adj[v] & ~v_masks[bi]) == 0:
                inter[v] = ("z", bi, 0)
                repaired += 1

    # fingerprints over the connecting/balancing labels
    q_masks = [0] * r  # q2 union q4 per block
    z2_masks = [0] * r
    z35_masks = [0] * r
    for v, (kind, bi, z) in inter.items():
        if kind == "q" and z in (2, 4):
            q_masks[bi] |= 1 << v
        elif kind == "z" and z == 2:
            z2_masks[bi] |= 1 << v
        elif kind == "z" and z in (3, 5):
            z35_masks[bi] |= 1 << v

    small = [v for v, (kind, bi, z) in inter.items() if not (kind == "z" and z in (0, 1))]
    triples: Dict[int, Tuple[int, int, int]] = {}
    for v in small:
        kind, bi, z = inter[v]
        d1 = (hgraph.adj[v] & v_masks[bi]).bit_count()
        d2 = (hgraph.adj[v] & q_masks[bi]).bit_count()
        if (kind, z) == ("z", 4):
            d3 = (hgraph.adj[v] & z35_masks[bi]).bit_count()
        else:
            d3 = (hgraph.adj[v] & z2_masks[bi]).bit_count()
        triples[v] = (d1, d2, d3)

    cube = hgraph.power(3)
    if cube.max_degree() > delta**3:
        raise AssertionError("cube degree exceeded delta^3 (internal bug)")

    class_index: Dict[int, int] = {}
    if t_override is None:
        cube_colors = equitable_coloring(cube, delta**3 + 1)
        for v in small:
            d1, d2, d3 = triples[v]
            class_index[v] = ((d1 * (delta + 1) + d2) * (delta + 1) + d3) * (delta**3 + 1) + cube_colors[v] + 1
    else:
        groups: Dict[Tuple, List[int]] = {}
        for v in small:
            kind, bi, z = inter[v]
            groups.setdefault((kind, bi, z), []).append(v)
        for key, members in groups.items():
            by_triple: Dict[Tuple[int, int, int], List[int]] = {}
            for v in sorted(members):
                by_triple.setdefault(triples[v], []).append(v)
            labels: List[Tuple] = []
            assignment: Dict[int, Tuple] = {}
            for triple in sorted(by_triple):
                # greedy proper coloring of the cube graph within the group
                colors_used: Dict[int, int] = {}
                for v in by_triple[triple]:
                    taken = {colors_used[w] for w in bits(cube.adj[v]) if w in colors_used}
                    c = 0
                    while c in taken:
                        c += 1
                    colors_used[v] = c
                    assignment[v] = (triple, c)
                labels.extend(sorted({(triple, c) for c in colors_used.values()}))
            if len(labels) > t:
                raise ValueError(
                    f"class bundle {key} needs {len(labels)} fingerprint classes, "
                    f"exceeding the t override {t}"
                )
            label_pos = {lab: j + 1 for j, lab in enumerate(sorted(labels))}
            for v in members:
                class_index[v] = label_pos[assignment[v]]

    # assemble the role homomorphism
    h: Dict[int, Role] = {}
    for v, (kind, bi, z) in inter.items():
        i = bi + 1
        if kind == "z" and z == 0:
            h[v] = ("u", i, 0)
        elif kind == "z" and z == 1:
            h[v] = ("v", i, 0)
        else:
            role, half = _ZKIND_TO_ROLE[z] if kind == "z" else _QKIND_TO_ROLE[z]
            j = class_index[v] + (t_spin if half == "high" else 0)
            h[v] = (role, i, j)

    if not is_role_homomorphism(hgraph, h, r, t_spin):
        raise RuntimeError("guest partition produced a non-homomorphism (internal bug)")

    u_classes: List[List[int]] = [[] for _ in range(r)]
    v_classes: List[List[int]] = [[] for _ in range(r)]
    c_classes: Dict[Tuple[int, int], List[int]] = {}
    cp_classes: Dict[Tuple[int, int], List[int]] = {}
    b_classes: Dict[Tuple[int, int], List[int]] = {}
    bp_classes: Dict[Tuple[int, int], List[int]] = {}
    for v in range(m):
        kind, i, j = h[v]
        if kind == "u":
            u_classes[i - 1].append(v)
        elif kind == "v":
            v_classes[i - 1].append(v)
        else:
            {"c": c_classes, "cp": cp_classes, "b": b_classes, "bp": bp_classes}[kind].setdefault(
                (i, j), []
            ).append(v)

    x_sets = []
    for i in range(r):
        umask = mask_of(u_classes[i])
        x_sets.append(sorted(v for v in v_classes[i] if hgraph.adj[v] & ~umask))

    beta = w / m if m else 0.0
    beta_bar = 1.0 / (ell * ell)
    lem_ineqs = {
        "blocks_fit": (1 / r - 4 * beta) >= beta / beta_bar if beta_bar else False,
        "zone_mass": 4 * beta * r <= eta / (20 * r),
        "imbalance": 16 * delta * beta * r <= eta * (1 / r - 4 * beta) * (0.5 - 5 * eta_bar),
    }
    diagnostics = {
        "bandwidth": bw,
        "zone_width": w,
        "ell": ell,
        "eta_bar": eta_bar,
        "repaired": repaired,
        "paper_chain_inequalities": lem_ineqs,
    }
    return HPartition(
        h=h,
        r=r,
        t=t,
        t_spin=t_spin,
        eta=eta,
        delta=delta,
        m=m,
        u_classes=u_classes,
        v_classes=v_classes,
        c_classes=c_classes,
        cp_classes=cp_classes,
        b_classes=b_classes,
        bp_classes=bp_classes,
        x_sets=x_sets,
        diagnostics=diagnostics,
    )


def verify_H_partition(hgraph: Graph, part: HPartition, slack: Optional[int] = None) -> dict:
    """Literal check of the five class guarantees plus the homomorphism itself.

    Size bounds are checked with an additive rounding slack (default: the
    declared max degree), recorded in the report.
    """
    if slack is None:
        slack = part.delta
    m, r, eta = part.m, part.r, part.eta
    report: dict = {"slack": slack}
    failures: List[dict] = []

    big_cap = (1 + eta) * m / (2 * r) + slack
    for i in range(1, r + 1):
        for kind, cls in (("u", part.class_of("u", i)), ("v", part.class_of("v", i))):
            if len(cls) > big_cap:
                failures.append({"check": "H1", "class": f"{kind}_{i}", "size": len(cls), "cap": big_cap})
    report["H1"] = {"holds": not [f for f in failures if f["check"] == "H1"], "cap": big_cap}

    small_cap = eta * m / (2 * r) + slack
    small_classes = [
        (kind, key, cls)
        for kind, classes in (
            ("c", part.c_classes),
            ("cp", part.cp_classes),
            ("b", part.b_classes),
            ("bp", part.bp_classes),
        )
        for key, cls in classes.items()
    ]
    for kind, key, cls in small_classes:
        if len(cls) > small_cap:
            failures.append({"check": "H2", "class": f"{kind}_{key}", "size": len(cls), "cap": small_cap})
    report["H2"] = {"holds": not [f for f in failures if f["check"] == "H2"], "cap": small_cap}

    cube = hgraph.power(3)
    for kind, key, cls in small_classes:
        cmask = mask_of(cls)
        for v in cls:
            if cube.adj[v] & cmask & ~(1 << v):
                other = next(iter(bits(cube.adj[v] & cmask & ~(1 << v))))
                failures.append({"check": "H3", "class": f"{kind}_{key}", "witness": [v, other]})
                break
    report["H3"] = {"holds": not [f for f in failures if f["check"] == "H3"]}

    t_spin = part.t_spin
    for i in range(1, r + 1):
        vmask = mask_of(part.class_of("v", i))
        for kind in ("c", "b"):
            for j in range(1, 2 * t_spin + 1):
                cls = part.class_of(kind, i, j)
                if not cls:
                    continue
                degs = [(hgraph.adj[y] & vmask).bit_count() for y in cls]
                if len(set(degs)) > 1 or max(degs) > part.delta - 1:
                    failures.append(
                        {"check": "H4", "class": f"{kind}_({i},{j})", "mode": "big-degree", "degs": sorted(set(degs))}
                    )
        c_union = mask_of([y for j in range(1, 2 * t_spin + 1) for y in part.class_of("c", i, j)])
        for j in range(1, 2 * t_spin + 1):
            cls = part.class_of("cp", i, j)
            if not cls:
                continue
            degs = [(hgraph.adj[y] & c_union).bit_count() for y in cls]
            if len(set(degs)) > 1:
                failures.append({"check": "H4", "class": f"cp_({i},{j})", "mode": "c-degree", "degs": sorted(set(degs))})
        b_union = mask_of([y for j in range(1, 2 * t_spin + 1) for y in part.class_of("b", i, j)])
        prior = 0
        for j in range(1, 2 * t_spin + 1):
            cls = part.class_of("bp", i, j)
            if cls:
                lmask = b_union | prior
                degs = [(hgraph.adj[y] & lmask).bit_count() for y in cls]
                if len(set(degs)) > 1:
                    failures.append(
                        {"check": "H4", "class": f"bp_({i},{j})", "mode": "ladder-degree", "degs": sorted(set(degs))}
                    )
            prior |= mask_of(part.class_of("bp", i, j))
    report["H4"] = {"holds": not [f for f in failures if f["check"] == "H4"]}

    for i in range(1, r + 1):
        cap = eta * len(part.class_of("v", i)) + slack
        if len(part.x_sets[i - 1]) > cap:
            failures.append({"check": "H5", "i": i, "size": len(part.x_sets[i - 1]), "cap": cap})
    report["H5"] = {"holds": not [f for f in failures if f["check"] == "H5"]}

    hom = is_role_homomorphism(hgraph, part.h, part.r, part.t_spin)
    report["homomorphism"] = hom
    report["failures"] = failures
    report["all_ok"] = hom and not failures
    return report
