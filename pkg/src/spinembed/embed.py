"""Embedding engines.

candidate_graph materializes "who can host whom" for a fixed injection of
the guest's right class; switching_repair nudges an injection away from
forbidden spots by greedy switchings; blowup_embed embeds a bipartite pair
via candidate-graph matchings while keeping special sets off forbidden sets;
connection_embed places the small connecting/balancing classes one class at
a time inside shrinking candidate sets; full_embed chains the host and guest
partitions with both engines and verifies the result.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .bitset import bit_list, bits, mask_of
from .density import (
    Bad_lsets,
    DensityParams,
    SetFamily,
    bad_lsets,
    check_dense_mc,
    corrupted_vertices,
)
from .graphs import Graph
from .gpartition import (
    GParams,
    GPartition,
    ReducedGraph,
    carve_clusters,
    find_spanning_ladder,
    reduced_min_degree,
    regularity_partition,
)
from .hpartition import HPartition, equitable_coloring, partition_H
from .matching import CandidateGraph, hall_matching, neighborhood_distance
from .seeds import derive_seed
from .spin import Role, spin_graph


def candidate_graph(
    hgraph: Graph,
    hu: Sequence[int],
    hv: Sequence[int],
    ggraph: Graph,
    gu: Sequence[int],
    gv: Sequence[int],
    f: Dict[int, int],
) -> CandidateGraph:
    """Bipartite graph with an edge (u~, u) iff f maps N(u~) into N(u).

    Neighborhoods are taken within the declared classes: N(u~) is restricted
    to hv and candidates are drawn from gu.
    """
    if len(set(f.values())) != len(f):
        raise ValueError("f must be injective")
    hv_mask = mask_of(hv)
    gu_list = list(gu)
    gu_mask = mask_of(gu_list)
    right_index = {u: k for k, u in enumerate(gu_list)}
    nbr: List[int] = []
    for ut in hu:
        imgs = [f[x] for x in bits(hgraph.adj[ut] & hv_mask)]
        cand = gu_mask
        for v in imgs:
            cand &= ggraph.adj[v]
            if not cand:
                break
        row = 0
        for u in bits(cand):
            row |= 1 << right_index[u]
        nbr.append(row)
    return CandidateGraph(left=list(hu), right=gu_list, nbr=nbr, f=dict(f))


class ForbiddenFamily:
    """Forbidden Delta-sets, explicit or as a (Delta-1)-set base times the
    ground set (a set is forbidden iff it contains a base member)."""

    def __init__(self, delta: int, explicit: Optional[SetFamily] = None, base: Optional[SetFamily] = None):
        if explicit is not None and explicit.ell != delta:
            raise ValueError("explicit family must consist of delta-sets")
        if base is not None and base.ell != delta - 1:
            raise ValueError("base family must consist of (delta-1)-sets")
        self.delta = delta
        self.explicit: Set[frozenset] = set(map(frozenset, explicit.sets)) if explicit else set()
        self.base: Set[frozenset] = set(map(frozenset, base.sets)) if base else set()

    def contains(self, vertices: Sequence[int]) -> bool:
        fs = frozenset(vertices)
        if len(fs) != self.delta:
            return False
        if fs in self.explicit:
            return True
        if self.base:
            for sub in itertools.combinations(sorted(fs), self.delta - 1):
                if frozenset(sub) in self.base:
                    return True
        return False

    def size_bound(self, ground_size: int) -> int:
        return len(self.explicit) + len(self.base) * ground_size

    def enumerate_over(self, ground: Sequence[int]) -> SetFamily:
        out = set(map(tuple, (sorted(s) for s in self.explicit)))
        for sub in self.base:
            for v in ground:
                if v not in sub:
                    out.add(tuple(sorted((*sub, v))))
        return SetFamily(self.delta, sorted(out))


@dataclass
class ConstraintSets:
    """Special sets on the guest side, forbidden sets on the host side."""

    specials: SetFamily
    forbidden: ForbiddenFamily

    def specials_multiplicity_ok(self, delta: int) -> bool:
        counts: Dict[int, int] = {}
        for s in self.specials.sets:
            for v in s:
                counts[v] = counts.get(v, 0) + 1
        return all(c <= delta for c in counts.values())


@dataclass
class RepairResult:
    f: Dict[int, int]
    switches: int
    ok: bool
    residual: List[Tuple[str, Tuple[int, ...]]]


def switching_repair(
    f: Dict[int, int],
    offense_fn: Callable[[Dict[int, int]], List[Tuple[str, Tuple[int, ...]]]],
    codomain: Sequence[int],
    budget: int,
    seed: int = 0,
) -> RepairResult:
    """Greedy local search: swap or relocate the image of one offending vertex,
    accept only moves that strictly reduce the offense count.

    A move either switches the images of two domain vertices or relocates one
    image to an unused codomain vertex; both count toward the budget, and
    either changes at most 2*Delta candidate neighborhoods.
    """
    cur = dict(f)
    rng = random.Random(seed)
    domain = sorted(cur)
    used = set(cur.values())
    free = sorted(set(codomain) - used)
    offenses = offense_fn(cur)
    switches = 0
    attempts = 0
    max_attempts = max(8 * budget, 32)
    while offenses and switches < budget and attempts < max_attempts:
        attempts += 1
        kind, verts = offenses[rng.randrange(len(offenses))]
        v = verts[rng.randrange(len(verts))]
        relocate = free and (rng.random() < 0.5)
        if relocate:
            new_img = free[rng.randrange(len(free))]
            old_img = cur[v]
            cur[v] = new_img
            new_off = offense_fn(cur)
            if len(new_off) < len(offenses):
                free.remove(new_img)
                free.append(old_img)
                free.sort()
                offenses = new_off
                switches += 1
            else:
                cur[v] = old_img
        else:
            other = domain[rng.randrange(len(domain))]
            if other == v:
                continue
            cur[v], cur[other] = cur[other], cur[v]
            new_off = offense_fn(cur)
            if len(new_off) < len(offenses):
                offenses = new_off
                switches += 1
            else:
                cur[v], cur[other] = cur[other], cur[v]
    return RepairResult(cur, switches, not offenses, offenses)


@dataclass
class BlowupParams:
    delta: int
    d: float
    eps: float
    p: float
    eta: float = 0.05
    parts: Optional[int] = None  # None: delta^2 + 1
    retries: int = 10
    switch_budget_frac: float = 0.05
    corruption_x_frac: float = 0.05
    bad_enum_cap: int = 2_000_000
    mc_trials: int = 16


@dataclass
class BlowupResult:
    ok: bool
    embedding: Dict[int, int]
    attempts: int
    diagnostics: dict = field(default_factory=dict)


def _balanced_chunks(items: List[int], parts: int) -> List[List[int]]:
    out: List[List[int]] = [[] for _ in range(parts)]
    for k, v in enumerate(items):
        out[k % parts].append(v)
    return out


def blowup_embed(
    ggraph: Graph,
    gu: Sequence[int],
    gv: Sequence[int],
    hgraph: Graph,
    hu: Sequence[int],
    hv: Sequence[int],
    constraints: ConstraintSets,
    params: BlowupParams,
    seed: int = 0,
) -> BlowupResult:
    """Embed the bipartite guest pair (hu, hv) into the host pair (gu, gv).

    Strategy: drop host vertices corrupted by the forbidden family plus the
    small-joint-neighborhood sets of each gu part, sample a random injection
    of hv, repair it by switchings against special/forbidden hits and
    candidate-degree floors, then match each hu part in its candidate graph.
    Fresh injections are retried up to the cap; a success always satisfies
    the no-special-to-forbidden contract.
    """
    delta = params.delta
    if len(hu) > (1 - params.eta) * len(gu) or len(hv) > (1 - params.eta) * len(gv):
        raise ValueError("guest classes too large for the host pair at this eta")
    if not constraints.specials_multiplicity_ok(delta):
        raise ValueError("some guest vertex lies in more than delta special sets")

    parts = params.parts if params.parts is not None else delta * delta + 1
    gu_list = sorted(gu)
    gv_list = sorted(gv)
    u_parts = [sorted(c) for c in _balanced_chunks(gu_list, parts)]

    hu_list = sorted(hu)
    two_independent = False
    if parts > 1:
        sq, to_global = hgraph.induced(hu_list)
        sq2 = sq.power(2)
        if sq2.max_degree() + 1 <= parts:
            colors = equitable_coloring(sq2, parts)
            hu_parts = [[] for _ in range(parts)]
            for local, c in enumerate(colors):
                hu_parts[c].append(to_global[local])
            hu_parts = [sorted(c) for c in hu_parts]
            two_independent = True
        else:
            hu_parts = [sorted(c) for c in _balanced_chunks(hu_list, parts)]
    else:
        hu_parts = [hu_list]

    dens_floor = DensityParams(p=params.p, eps=params.d / 2, d=params.d)
    bad_mode = "enumerated"
    bad_family_sets: Set[Tuple[int, ...]] = set(map(tuple, constraints.forbidden.enumerate_over(gv_list).sets))
    enumerated_families = 0
    if math.comb(len(gv_list), delta) * parts <= params.bad_enum_cap:
        for U_j in u_parts:
            fam = bad_lsets(ggraph, gv_list, U_j, delta, dens_floor)
            bad_family_sets.update(fam.sets)
            enumerated_families += 1
    else:
        bad_mode = "floor-only"
    bprime = SetFamily(delta, sorted(bad_family_sets)) if bad_family_sets else SetFamily(delta, [])
    # the corruption threshold must clear the membership count that the
    # base-times-ground structure of the forbidden family forces on every
    # vertex, and scale with the number of unioned per-part families,
    # otherwise the union blankets the whole cluster
    x_thr = len(constraints.forbidden.base) + (enumerated_families + 1) * max(
        params.corruption_x_frac * len(gv_list), 1.0
    )
    excluded = set(corrupted_vertices(gv_list, bprime, x_thr)) if bprime.sets else set()
    v_avail = [v for v in gv_list if v not in excluded]
    if len(hv) > len(v_avail):
        return BlowupResult(False, {}, 0, {"stage": "corruption", "excluded": len(excluded)})

    hv_list = sorted(hv)
    hv_mask = mask_of(hv_list)
    floors = [max(1, math.ceil(((params.d / 2) * params.p) ** delta * len(U_j))) for U_j in u_parts]
    part_masks = [mask_of(U_j) for U_j in u_parts]
    delta_v = max((hgraph.adj[x] & mask_of(hu_list)).bit_count() for x in hv_list) if hv_list else 0

    def offense_fn(f: Dict[int, int]) -> List[Tuple[str, Tuple[int, ...]]]:
        out: List[Tuple[str, Tuple[int, ...]]] = []
        for T in constraints.specials.sets:
            if constraints.forbidden.contains([f[x] for x in T]):
                out.append(("special", T))
        for j, (U_j, floor_j) in enumerate(zip(hu_parts, floors)):
            for ut in U_j:
                nbrs = bit_list(hgraph.adj[ut] & hv_mask)
                if not nbrs:
                    continue
                cand = part_masks[j]
                for x in nbrs:
                    cand &= ggraph.adj[f[x]]
                    if not cand:
                        break
                if cand.bit_count() < floor_j:
                    out.append(("floor", tuple(nbrs)))
        return out

    rng = random.Random(seed)
    budget = max(1, math.ceil(params.switch_budget_frac * len(hv_list)))
    attempts_log = []
    for attempt in range(params.retries):
        images = rng.sample(v_avail, len(hv_list))
        f0 = dict(zip(hv_list, images))
        rep = switching_repair(f0, offense_fn, v_avail, budget, seed=rng.randrange(1 << 30))
        if not rep.ok:
            attempts_log.append({"attempt": attempt, "stage": "repair", "residual": len(rep.residual)})
            continue
        # deterministic switching-distance bound on every repaired injection
        for j, U_j in enumerate(hu_parts):
            b0 = candidate_graph(hgraph, U_j, hv_list, ggraph, u_parts[j], v_avail, f0)
            b1 = candidate_graph(hgraph, U_j, hv_list, ggraph, u_parts[j], v_avail, rep.f)
            nd = neighborhood_distance(b0, b1)
            if nd > 2 * rep.switches * max(delta_v, 1):
                raise RuntimeError("switching distance bound violated (internal bug)")
        matchings: Dict[int, int] = {}
        failed = None
        for j, U_j in enumerate(hu_parts):
            bj = candidate_graph(hgraph, U_j, hv_list, ggraph, u_parts[j], v_avail, rep.f)
            mres = hall_matching(bj)
            if not mres.covers_left:
                failed = {"attempt": attempt, "stage": "matching", "part": j, "deficient": mres.deficient}
                break
            matchings.update(mres.matching)
        if failed:
            attempts_log.append(failed)
            continue
        embedding = dict(rep.f)
        embedding.update(matchings)
        for T in constraints.specials.sets:
            if constraints.forbidden.contains([embedding[x] for x in T]):
                raise RuntimeError("special set landed on a forbidden set (internal bug)")
        return BlowupResult(
            True,
            embedding,
            attempt + 1,
            {
                "switches": rep.switches,
                "excluded": len(excluded),
                "bad_mode": bad_mode,
                "two_independent": two_independent,
                "parts": parts,
                "attempts_log": attempts_log,
            },
        )
    return BlowupResult(
        False,
        {},
        params.retries,
        {"attempts_log": attempts_log, "excluded": len(excluded), "bad_mode": bad_mode, "parts": parts},
    )


@dataclass
class ConnClass:
    vertices: List[int]
    cluster: int  # index into CandidateSystem.clusters


@dataclass
class CandidateSystem:
    clusters: List[List[int]]
    classes: List[ConnClass]
    x_sets: Dict[int, Tuple[int, ...]]

    def all_guest_vertices(self) -> List[int]:
        return [v for c in self.classes for v in c.vertices]


@dataclass
class ConnParams:
    delta: int
    d: float
    eps: float
    p: float
    xi: float = 0.75
    density_samples: int = 64
    check_inheritance: bool = True
    # candidate pairs with a side below this size skip density checks
    # (Monte Carlo sampling below it carries no signal); gated pairs recorded
    density_min_size: int = 3


class ConnPreconditionError(ValueError):
    def __init__(self, condition: str, detail: str):
        super().__init__(f"connection precondition {condition} failed: {detail}")
        self.condition = condition


@dataclass
class ConnResult:
    ok: bool
    embedding: Dict[int, int]
    failed_round: Optional[int] = None
    deficient: Optional[List[int]] = None
    stage: str = ""
    floors_ok: bool = True


def _check_conn_preconditions(
    ggraph: Graph, hgraph: Graph, sys: CandidateSystem, params: ConnParams, c_init: Dict[int, int]
) -> None:
    cube = hgraph.power(3)
    ldeg: Dict[int, int] = {}
    earlier_mask = 0
    for ci in sys.classes:
        cmask = mask_of(ci.vertices)
        for y in ci.vertices:
            ldeg[y] = (hgraph.adj[y] & earlier_mask).bit_count()
        earlier_mask |= cmask
    window_mask = earlier_mask

    for idx, ci in enumerate(sys.classes):
        cluster = sys.clusters[ci.cluster]
        if len(ci.vertices) > params.xi * len(cluster):
            raise ConnPreconditionError("A", f"class {idx} has {len(ci.vertices)} vertices vs cluster {len(cluster)}")
        cmask = mask_of(ci.vertices)
        for y in ci.vertices:
            if cube.adj[y] & cmask & ~(1 << y):
                raise ConnPreconditionError("B", f"class {idx} is not 3-independent (vertex {y})")
        seen = 0
        profile = None
        for y in ci.vertices:
            xs = sys.x_sets.get(y, ())
            xm = mask_of(xs)
            if xm & seen:
                raise ConnPreconditionError("C", f"external sets overlap within class {idx}")
            seen |= xm
            edeg = len(xs)
            if profile is None:
                profile = edeg + ldeg[y]
            elif edeg + ldeg[y] != profile:
                raise ConnPreconditionError("C", f"edeg+ldeg not constant in class {idx}")
            if (hgraph.adj[y] & window_mask).bit_count() + edeg > params.delta:
                raise ConnPreconditionError("C", f"deg+edeg exceeds delta at vertex {y}")
            floor = ((params.d - params.eps) * params.p) ** edeg * len(cluster)
            if c_init[y].bit_count() < floor:
                raise ConnPreconditionError("D", f"candidate set of {y} below {floor:.2f}")

    if params.check_inheritance:
        rng = random.Random(0xC0FFEE)
        for x, y in hgraph.edges():
            if x not in c_init or y not in c_init:
                continue
            ca, cb = bit_list(c_init[x]), bit_list(c_init[y])
            if min(len(ca), len(cb)) < params.density_min_size:
                continue
            dens = DensityParams(p=params.p, eps=params.eps, d=params.d)
            trials = max(1, params.density_samples // max(len(ca), 1))
            verdict = check_dense_mc(ggraph, ca, cb, dens, trials=min(trials, 16), seed=rng.randrange(1 << 30))
            if verdict.verdict == "not-dense":
                raise ConnPreconditionError("E", f"candidate pair of edge ({x},{y}) refuted: {verdict.witness}")


def connection_embed(
    ggraph: Graph,
    hgraph: Graph,
    sys: CandidateSystem,
    params: ConnParams,
    seed: int = 0,
) -> ConnResult:
    """Embed the classes one at a time, each vertex inside its candidate set.

    Candidate sets start as the joint neighborhoods of the external anchor
    sets inside the class's cluster and shrink by embedded-neighbor
    intersections; each round filters vertices that would starve a future
    neighbor's candidate set, then picks a system of distinct representatives
    by bipartite matching.  Classes may share a host cluster: used vertices
    are excluded.
    """
    guest = sys.all_guest_vertices()
    if len(set(guest)) != len(guest):
        raise ValueError("classes must be pairwise disjoint")
    window_mask = mask_of(guest)
    class_of: Dict[int, int] = {}
    for idx, ci in enumerate(sys.classes):
        for y in ci.vertices:
            class_of[y] = idx

    cluster_masks = [mask_of(c) for c in sys.clusters]
    c_init: Dict[int, int] = {}
    for ci in sys.classes:
        cm = cluster_masks[ci.cluster]
        for y in ci.vertices:
            cand = cm
            for a in sys.x_sets.get(y, ()):
                cand &= ggraph.adj[a]
            c_init[y] = cand

    _check_conn_preconditions(ggraph, hgraph, sys, params, c_init)

    rng = random.Random(seed)
    c_cur = dict(c_init)
    used = [0] * len(sys.clusters)
    phi: Dict[int, int] = {}
    dens = DensityParams(p=params.p, eps=params.eps, d=params.d)
    floors_ok = True

    for idx, ci in enumerate(sys.classes):
        if not ci.vertices:
            continue
        rows = []
        cluster_list = sys.clusters[ci.cluster]
        right_index = {u: k for k, u in enumerate(cluster_list)}
        for y in ci.vertices:
            avail = c_cur[y] & ~used[ci.cluster]
            keep = 0
            for v in bits(avail):
                ok = True
                future = [z for z in bits(hgraph.adj[y] & window_mask) if class_of[z] > idx and z not in phi]
                for z in future:
                    cz = c_cur[z]
                    inter = ggraph.adj[v] & cz
                    if inter.bit_count() < (params.d - params.eps) * params.p * cz.bit_count():
                        ok = False
                        break
                    if params.check_inheritance:
                        # spot-check that the shrunken candidate set stays dense
                        # with the candidate sets of z's own unembedded neighbors
                        for zp in bits(hgraph.adj[z] & window_mask):
                            if zp in phi or class_of[zp] <= idx or zp == y:
                                continue
                            czp = c_cur[zp]
                            if inter.bit_count() < params.density_min_size or czp.bit_count() < params.density_min_size:
                                continue
                            verdict = check_dense_mc(
                                ggraph,
                                bit_list(inter),
                                bit_list(czp),
                                dens,
                                trials=max(1, params.density_samples // 16),
                                seed=rng.randrange(1 << 30),
                            )
                            if verdict.verdict == "not-dense":
                                ok = False
                                break
                    if not ok:
                        break
                if ok:
                    keep |= 1 << v
            row = 0
            for v in bits(keep):
                row |= 1 << right_index[v]
            rows.append(row)
        cg = CandidateGraph(left=list(ci.vertices), right=list(cluster_list), nbr=rows)
        mres = hall_matching(cg)
        if not mres.covers_left:
            return ConnResult(False, dict(phi), failed_round=idx, deficient=mres.deficient, stage="sdr")
        for y, v in mres.matching.items():
            phi[y] = v
            used[ci.cluster] |= 1 << v
        # shrink candidate sets of future neighbors and check the floors
        for y in ci.vertices:
            for z in bits(hgraph.adj[y] & window_mask):
                if z in phi or class_of[z] <= idx:
                    continue
                c_cur[z] &= ggraph.adj[phi[y]]
        for ci2 in sys.classes[idx + 1 :]:
            for z in ci2.vertices:
                embedded_nbrs = [x for x in bits(hgraph.adj[z] & window_mask) if x in phi]
                recomputed = c_init[z]
                for x in embedded_nbrs:
                    recomputed &= ggraph.adj[phi[x]]
                if recomputed != c_cur[z]:
                    raise RuntimeError("candidate-set maintenance diverged from the intersection formula")
                floor = ((params.d * params.p) / 2) ** len(embedded_nbrs) * c_init[z].bit_count()
                if c_cur[z].bit_count() < floor:
                    floors_ok = False
                    return ConnResult(False, dict(phi), failed_round=idx, stage="st-floor", floors_ok=False)

    return ConnResult(True, phi, floors_ok=floors_ok)


def write_embedding(e: Dict[int, int]) -> str:
    """One "guest-vertex host-vertex" line per mapped vertex."""
    return "\n".join(f"{g} {h}" for g, h in sorted(e.items())) + "\n"


def read_embedding(text: str) -> Dict[int, int]:
    out = {}
    for line in text.splitlines():
        if line.strip():
            g, h = (int(x) for x in line.split())
            out[g] = h
    return out


def verify_embedding(guest: Graph, host: Graph, e: Dict[int, int]) -> bool:
    """Injectivity plus edge preservation for a complete embedding."""
    for v in range(guest.n):
        if v not in e:
            raise ValueError(f"embedding is partial: guest vertex {v} unmapped")
    if len(set(e.values())) != guest.n:
        return False
    for x, y in guest.edges():
        if not host.has_edge(e[x], e[y]):
            return False
    return True


@dataclass(frozen=True)
class PlantedSizes:
    big: int
    connecting: int
    balancing: int

    def __post_init__(self):
        if min(self.big, self.connecting, self.balancing) < 1:
            raise ValueError("cluster sizes must be positive")


def gen_planted_spin_host(
    r: int,
    t: int,
    sizes: PlantedSizes,
    d: float,
    p: float,
    seed: int = 0,
    eta: Optional[float] = None,
    eta_prime: Optional[float] = None,
    eps: float = 0.3,
) -> Tuple[Graph, GPartition]:
    """Blow-up of the spin graph: every spin edge becomes a random bipartite
    graph with exactly round(d*p*|A||B|) edges.  Emits the ground truth."""
    spin = spin_graph(r, t)
    rng = random.Random(seed)
    clusters: Dict[Role, List[int]] = {}
    nxt = 0
    for role in spin.roles:
        kind = role[0]
        size = sizes.big if kind in ("u", "v") else sizes.connecting if kind in ("c", "cp") else sizes.balancing
        clusters[role] = list(range(nxt, nxt + size))
        nxt += size
    host = Graph(nxt)
    for a, b in spin.graph.edges():
        ca, cb = clusters[spin.role_of(a)], clusters[spin.role_of(b)]
        want = round(d * p * len(ca) * len(cb))
        for idx in rng.sample(range(len(ca) * len(cb)), want):
            host.add_edge(ca[idx // len(cb)], cb[idx % len(cb)])
    n = host.n
    small = min(sizes.connecting, sizes.balancing)
    if eta_prime is None:
        eta_prime = small * 2 * r / n
    if eta is None:
        # describe the planted big-cluster fraction exactly (with headroom)
        eta = min(0.99, 1.0 - sizes.big * 2 * r / n + 1e-9)
    gparams = GParams(r=r, t=t, eta=eta, eta_prime=eta_prime, d=d, eps=eps, p=p)
    certs = [{"pair": None, "note": "planted ground truth; re-verify via verify_G_partition"}]
    gpart = GPartition(spin, clusters, [], gparams, certs, {"planted": True, "sizes": sizes.__dict__})
    return host, gpart


def _build_aligned_guest_graph(mb: int, r: int, seed: int, skew_chunks: int) -> Tuple[Graph, List[int]]:
    from .hpartition import _derive_eta_bar, block_layout, lolly_layout

    w = 1
    m = mb * r
    layout = block_layout(m, r, w)
    m_bar_min = min(e - s for s, e in layout.s_parts)
    eta_bar, _ = _derive_eta_bar(m_bar_min, w)
    g = Graph(m)
    rng = random.Random(seed)
    for bi, (s_lo, s_hi) in enumerate(layout.s_parts):
        lay = lolly_layout(s_hi - s_lo, eta_bar)
        skewed = set(rng.sample(range(1, lay.ell - 1), min(skew_chunks, lay.ell - 2)))
        for q, (c_lo, c_hi) in enumerate(lay.chunks):
            lo = s_lo + c_lo
            hi = s_lo + c_hi - 5 * lay.zone  # keep the buffer zones edge-free
            if q in skewed:
                # 3-vertex paths: each tilts the color balance by one
                pos = lo
                while pos + 2 < hi:
                    g.add_edge(pos, pos + 1)
                    g.add_edge(pos + 1, pos + 2)
                    pos += 3
            else:
                for pos in range(lo, hi - 1):
                    g.add_edge(pos, pos + 1)
    # one connector chain across each block boundary, walking
    # u -> v -> c_high -> c'_high -> c_low(next) -> v(next)
    for bi in range(r - 1):
        end = layout.blocks[bi][1]
        for pos in range(end - 6, end - 1):
            g.add_edge(pos, pos + 1)
    return g, list(range(m))


def gen_aligned_guest(
    gpart: GPartition,
    eta_h: float = 0.4,
    fill: float = 0.85,
    seed: int = 0,
    skew_chunks: int = 2,
    cap: float = 0.92,
) -> Tuple[Graph, List[int]]:
    """Guest instance shaped to the clusters of a host partition.

    Big regions carry paths (with a few color-skewed chunks so the balancing
    walk actually fires), buffer zones stay edge-free, and one 6-vertex chain
    per block boundary threads the connecting clusters.  The block size is
    tuned so the big guest classes land near `fill` of the big host clusters.
    """
    r, t = gpart.params.r, gpart.params.t
    big = min(len(gpart.cluster(k, i)) for k in ("u", "v") for i in range(1, r + 1))
    mb = int(2 * fill * big * 0.98) + 4
    for _ in range(8):
        guest, order = _build_aligned_guest_graph(mb, r, seed, skew_chunks)
        part = partition_H(guest, order, r, eta_h, 2, t_override=t)
        worst = 0.0
        for role in gpart.spin.roles:
            kind, i, j = role
            g_cls = gpart.cluster(kind, i, j)
            h_cls = part.class_of(kind, i, j)
            if h_cls and not g_cls:
                raise RuntimeError(f"guest occupies role {role} missing from the host partition")
            if g_cls:
                worst = max(worst, len(h_cls) / len(g_cls))
        if worst <= cap:
            return guest, order
        mb = int(mb * min(0.97, cap / worst))
    raise RuntimeError("could not size the aligned guest under the cluster cap")


@dataclass
class PipelineParams:
    delta: int = 2
    d: float = 0.5
    eps: float = 0.3
    p: float = 0.3
    gamma: float = 0.15
    eta_g: float = 0.5
    eta_h: float = 0.4
    eta_prime: float = 0.1
    t: int = 2
    r0: int = 8
    strategy: str = "refine-heuristic"
    mc_trials: int = 16
    blowup_parts: Optional[int] = 1
    blowup_retries: int = 10
    blowup_eta: float = 0.04
    switch_budget_frac: float = 0.1
    corruption_x_frac: float = 0.05
    bad_enum_cap: int = 2_000_000
    conn_xi: float = 0.75
    conn_density_samples: int = 64
    density_min_size: int = 12
    ladder_budget: int = 500_000
    size_compat_cap: float = 0.95


@dataclass
class FullEmbedResult:
    ok: bool
    embedding: Dict[int, int]
    stage: str
    reports: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"ok": self.ok, "stage": self.stage, "reports": self.reports, "mapped": len(self.embedding)}


def _window_parent_classes(hp: HPartition, gp: GPartition, i: int) -> List[Tuple[List[int], Role]]:
    """The connecting/balancing classes of window i in embedding order."""
    t = gp.params.t
    r = gp.params.r
    out: List[Tuple[List[int], Role]] = []
    for j in range(t + 1, 2 * t + 1):
        out.append((hp.class_of("c", i, j), ("c", i, j)))
    if i < r:
        for j in range(1, t + 1):
            out.append((hp.class_of("c", i + 1, j), ("c", i + 1, j)))
    for j in range(t + 1, 2 * t + 1):
        out.append((hp.class_of("cp", i, j), ("cp", i, j)))
    if i < r:
        for j in range(1, t + 1):
            out.append((hp.class_of("cp", i + 1, j), ("cp", i + 1, j)))
    for j in range(1, 2 * t + 1):
        out.append((hp.class_of("b", i, j), ("b", i, j)))
    for j in range(1, 2 * t + 1):
        out.append((hp.class_of("bp", i, j), ("bp", i, j)))
    return out


def full_embed(
    host: Graph,
    guest: Graph,
    order: Sequence[int],
    params: PipelineParams,
    seed: int = 0,
    gpart: Optional[GPartition] = None,
) -> FullEmbedResult:
    """End-to-end pipeline: host partition, guest partition, one blow-up per
    big pair with special/forbidden sets, then one connection run per window.

    A precomputed host partition (for example the planted ground truth) can
    be supplied to skip the regularity/ladder/carve stages.
    """
    if guest.n > host.n:
        raise ValueError("guest has more vertices than the host")
    if guest.max_degree() > params.delta:
        raise ValueError("guest exceeds the declared max degree")
    if guest.two_coloring() is None:
        raise ValueError("guest must be bipartite")
    reports: dict = {}
    dens = DensityParams(p=params.p, eps=params.eps, d=params.d)

    if gpart is None:
        rg = regularity_partition(
            host, dens, params.r0, params.strategy, seed=derive_seed(seed, "regularity"), mc_trials=params.mc_trials
        )
        if rg.r % 2 != 0:
            merged = rg.clusters[-1]
            rg = ReducedGraph(
                rg.clusters[:-1],
                rg.v0 + merged,
                {e for e in rg.edges if rg.r - 1 not in e},
                {k: v for k, v in rg.certificates.items() if rg.r - 1 not in k},
                rg.params,
                dict(rg.diagnostics, merged_odd_cluster=True),
            )
        reports["reduced"] = dict(rg.diagnostics)
        reports["reduced_min_degree"] = reduced_min_degree(rg, 0.5 + params.gamma, params.d, params.eps)
        ladder = find_spanning_ladder(rg, node_budget=params.ladder_budget)
        reports["ladder"] = {"found": ladder.found, "nodes": ladder.nodes}
        if not ladder.found:
            return FullEmbedResult(False, {}, "ladder", reports)
        try:
            gpart = carve_clusters(
                host,
                rg,
                ladder.rungs,
                params.t,
                params.eta_prime,
                dens,
                gamma=params.gamma,
                eta=params.eta_g,
                mc_trials=params.mc_trials,
                seed=derive_seed(seed, "carve"),
            )
        except ValueError as exc:
            reports["carve_error"] = str(exc)
            return FullEmbedResult(False, {}, "carve", reports)
    cert_summary = {"pairs": len(gpart.certificates)}
    refuted = sum(
        1 for c in gpart.certificates if isinstance(c, dict) and c.get("mc", {}).get("verdict") == "not-dense"
    )
    cert_summary["refuted"] = refuted
    reports["gpartition"] = {
        "r": gpart.params.r,
        "t": gpart.params.t,
        "supplied": gpart.diagnostics.get("planted", False),
        "certificates": cert_summary,
    }

    r, t = gpart.params.r, gpart.params.t
    try:
        hp = partition_H(guest, order, r, params.eta_h, params.delta, t_override=t)
    except ValueError as exc:
        reports["hpartition_error"] = str(exc)
        return FullEmbedResult(False, {}, "hpartition", reports)
    reports["hpartition"] = {"t": hp.t, "diagnostics": hp.diagnostics}

    # size compatibility: every guest class must fit its host cluster
    for role in gpart.spin.roles:
        kind, i, j = role
        h_cls = hp.class_of(kind, i, j)
        g_cls = gpart.cluster(kind, i, j)
        if len(h_cls) > params.size_compat_cap * len(g_cls):
            reports["size_compat"] = {"role": list(role), "guest": len(h_cls), "host": len(g_cls)}
            return FullEmbedResult(False, {}, "size-compat", reports)

    delta = params.delta
    f_bl: Dict[int, int] = {}
    blow_reports = []
    for i in range(1, r + 1):
        hu, hv = hp.class_of("u", i), hp.class_of("v", i)
        gu, gv = gpart.cluster("u", i), gpart.cluster("v", i)
        v_mask = mask_of(hv)
        u_mask = mask_of(hu)
        # special sets: neighborhoods (in the big v-class) of connecting and
        # balancing vertices, padded to delta-sets by fresh v-class vertices
        ys = []
        for kind in ("c", "b"):
            for j in range(1, 2 * t + 1):
                for y in hp.class_of(kind, i, j):
                    if guest.adj[y] & v_mask:
                        ys.append(y)
        x_i = set(hp.x_sets[i - 1])
        pad_pool = [v for v in hv if v not in x_i]
        pad_pos = 0
        specials = []
        for y in sorted(ys):
            base = bit_list(guest.adj[y] & v_mask)
            need = delta - len(base)
            if pad_pos + need > len(pad_pool):
                reports["specials_error"] = f"padding pool exhausted in block {i}"
                return FullEmbedResult(False, {}, "specials", reports)
            pad = pad_pool[pad_pos : pad_pos + need]
            pad_pos += need
            specials.append(tuple(sorted(base + pad)))
        # forbidden sets: (delta-1)-sets of the big v-cluster that are starved
        # or density-breaking toward some spin-adjacent primed small cluster
        base_sets: Set[Tuple[int, ...]] = set()
        checked_pairs = 0
        for kind in ("c", "b"):
            for j in range(1, 2 * t + 1):
                role_v = gpart.spin.vertex(kind, i, j)
                d_cluster = gpart.cluster(kind, i, j)
                if not hp.class_of(kind, i, j):
                    continue
                for nb in bits(gpart.spin.graph.adj[role_v]):
                    nk, ni, nj = gpart.spin.role_of(nb)
                    if nk not in ("cp", "bp"):
                        continue
                    dp_cluster = gpart.cluster(nk, ni, nj)
                    fam = Bad_lsets(
                        host,
                        gv,
                        d_cluster,
                        dp_cluster,
                        delta - 1,
                        dens,
                        mc_trials=params.mc_trials,
                        seed=derive_seed(seed, "bad", i, kind, j, nk, ni, nj),
                        density_min_size=params.density_min_size,
                    )
                    base_sets.update(fam.sets)
                    checked_pairs += 1
        forbidden = ForbiddenFamily(delta, base=SetFamily(delta - 1, sorted(base_sets)) if base_sets else None)
        constraints = ConstraintSets(SetFamily(delta, specials), forbidden)
        bp = BlowupParams(
            delta=delta,
            d=params.d,
            eps=params.eps,
            p=params.p,
            eta=params.blowup_eta,
            parts=params.blowup_parts,
            retries=params.blowup_retries,
            switch_budget_frac=params.switch_budget_frac,
            corruption_x_frac=params.corruption_x_frac,
            bad_enum_cap=params.bad_enum_cap,
            mc_trials=params.mc_trials,
        )
        res = blowup_embed(host, gu, gv, guest, hu, hv, constraints, bp, seed=derive_seed(seed, "blowup", i))
        blow_reports.append(
            {"i": i, "ok": res.ok, "attempts": res.attempts, "specials": len(specials), "bad_base": len(base_sets),
             "bad_pairs_checked": checked_pairs, **{k: v for k, v in res.diagnostics.items() if k != "attempts_log"}}
        )
        if not res.ok:
            reports["blowups"] = blow_reports
            reports["blowup_failure"] = res.diagnostics
            return FullEmbedResult(False, dict(f_bl), "blowup", reports)
        f_bl.update(res.embedding)
    reports["blowups"] = blow_reports

    v_blocks = [mask_of(hp.class_of("v", i)) for i in range(1, r + 1)]
    f_cl: Dict[int, int] = {}
    conn_reports = []
    for i in range(1, r + 1):
        parents = _window_parent_classes(hp, gpart, i)
        if not any(cls for cls, _ in parents):
            continue
        clusters: List[List[int]] = []
        classes: List[ConnClass] = []
        x_sets: Dict[int, Tuple[int, ...]] = {}
        cluster_index: Dict[Role, int] = {}
        window_mask_v = v_blocks[i - 1] | (v_blocks[i] if i < r else 0)
        earlier_mask = 0
        for cls, role in parents:
            if cls:
                if role not in cluster_index:
                    cluster_index[role] = len(clusters)
                    clusters.append(sorted(gpart.cluster(*role)))
                # refine by realized (edeg, ldeg) so the degree profile is constant
                groups: Dict[Tuple[int, int], List[int]] = {}
                for y in cls:
                    xs = tuple(sorted(f_bl[x] for x in bits(guest.adj[y] & window_mask_v)))
                    x_sets[y] = xs
                    prof = (len(xs), (guest.adj[y] & earlier_mask).bit_count())
                    groups.setdefault(prof, []).append(y)
                for prof in sorted(groups):
                    classes.append(ConnClass(sorted(groups[prof]), cluster_index[role]))
            earlier_mask |= mask_of(cls)
        sys = CandidateSystem(clusters, classes, x_sets)
        cp = ConnParams(
            delta=delta,
            d=params.d,
            eps=params.eps,
            p=params.p,
            xi=params.conn_xi,
            density_samples=params.conn_density_samples,
            density_min_size=params.density_min_size,
        )
        try:
            cres = connection_embed(host, guest, sys, cp, seed=derive_seed(seed, "conn", i))
        except ConnPreconditionError as exc:
            conn_reports.append({"i": i, "ok": False, "precondition": exc.condition, "detail": str(exc)})
            reports["connections"] = conn_reports
            return FullEmbedResult(False, dict(f_bl), "connection-pre", reports)
        conn_reports.append({"i": i, "ok": cres.ok, "classes": len(classes), "stage": cres.stage})
        if not cres.ok:
            reports["connections"] = conn_reports
            partial = dict(f_bl)
            partial.update(f_cl)
            return FullEmbedResult(False, partial, "connection", reports)
        f_cl.update(cres.embedding)
    reports["connections"] = conn_reports

    embedding = dict(f_bl)
    embedding.update(f_cl)
    case_counts = {"big-big": 0, "window-window": 0, "big-window": 0}
    big_mask = 0
    for i in range(1, r + 1):
        big_mask |= mask_of(hp.class_of("u", i)) | mask_of(hp.class_of("v", i))
    for x, y in guest.edges():
        inside = ((big_mask >> x) & 1) + ((big_mask >> y) & 1)
        key = "big-big" if inside == 2 else "window-window" if inside == 0 else "big-window"
        case_counts[key] += 1
    reports["edge_cases"] = case_counts
    ok = verify_embedding(guest, host, embedding)
    reports["verified"] = ok
    if not ok:
        return FullEmbedResult(False, embedding, "verify", reports)
    return FullEmbedResult(True, embedding, "done", reports)
