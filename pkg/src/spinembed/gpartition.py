"""Host-side partition pipeline.

Builds a dense-pair equipartition of the host (exact certification at tiny
scale, Monte Carlo refinement otherwise), reads off the reduced graph, finds
a spanning ladder in it by backtracking, picks a triangle apex for every
rung, and carves balancing / connecting / big clusters whose pairs inherit
density from the reduced edges.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .bitset import bits
from .density import DenseVerdict, DensityParams, check_dense_exact, check_dense_mc
from .graphs import Graph
from .spin import Role, SpinGraph, spin_graph

EXACT_CLUSTER_CAP = 17


@dataclass
class ReducedGraph:
    clusters: List[List[int]]
    v0: List[int]
    edges: Set[Tuple[int, int]]  # certified-dense cluster pairs, i < j
    certificates: Dict[Tuple[int, int], DenseVerdict]
    params: DensityParams
    diagnostics: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return len(self.clusters)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def degree(self, i: int) -> int:
        return sum(1 for j in range(self.r) if j != i and self.has_edge(i, j))


def _equipartition(n: int, r: int, order: Sequence[int]) -> Tuple[List[List[int]], List[int]]:
    size = n // r
    clusters = [list(order[i * size : (i + 1) * size]) for i in range(r)]
    v0 = list(order[r * size :])
    return clusters, v0


def regularity_partition(
    g: Graph,
    params: DensityParams,
    r0: int,
    strategy: str = "refine-heuristic",
    seed: int = 0,
    mc_trials: int = 24,
    refine_rounds: int = 200,
) -> ReducedGraph:
    """Equipartition into r0 clusters plus a small exceptional set, with a
    density certificate per surviving pair.

    exact-tiny certifies every pair exhaustively (cluster size <= 17);
    refine-heuristic starts from a seeded random equipartition and greedily
    swaps vertices to shrink the set of Monte-Carlo-refuted pairs.  Pairs
    still refuted at the end are excluded from the reduced edges; if more
    than an eps fraction of pairs stay refuted the result is flagged stalled.
    """
    if r0 < 1:
        raise ValueError("need r0 >= 1")
    n = g.n
    if strategy not in ("exact-tiny", "refine-heuristic"):
        raise ValueError(f"unknown partition strategy {strategy!r}")
    rng = random.Random(seed)
    if strategy == "exact-tiny":
        if n // r0 > EXACT_CLUSTER_CAP:
            raise ValueError(
                f"exact-tiny needs cluster size <= {EXACT_CLUSTER_CAP}, got {n // r0}"
            )
        clusters, v0 = _equipartition(n, r0, list(range(n)))
        edges: Set[Tuple[int, int]] = set()
        certs: Dict[Tuple[int, int], DenseVerdict] = {}
        for i in range(r0):
            for j in range(i + 1, r0):
                verdict = check_dense_exact(g, clusters[i], clusters[j], params)
                certs[(i, j)] = verdict
                if verdict.verdict == "dense":
                    edges.add((i, j))
        if len(v0) > params.eps * n:
            raise ValueError("exceptional set exceeds eps * n; raise r0 or eps")
        return ReducedGraph(clusters, v0, edges, certs, params, {"strategy": strategy})

    order = list(range(n))
    rng.shuffle(order)
    clusters, v0 = _equipartition(n, r0, order)
    if len(v0) > params.eps * n:
        raise ValueError("exceptional set exceeds eps * n; raise r0 or eps")

    def certify_pair(i: int, j: int) -> DenseVerdict:
        return check_dense_mc(g, clusters[i], clusters[j], params, trials=mc_trials, seed=rng.randrange(1 << 30))

    certs: Dict[Tuple[int, int], DenseVerdict] = {}
    for i in range(r0):
        for j in range(i + 1, r0):
            certs[(i, j)] = certify_pair(i, j)
    refuted = {k for k, v in certs.items() if v.verdict == "not-dense"}
    rounds = 0
    while refuted and rounds < refine_rounds:
        rounds += 1
        i, j = sorted(refuted)[rng.randrange(len(refuted))]
        wit = certs[(i, j)].witness
        side, cluster_idx = (0, i) if rng.random() < 0.5 else (1, j)
        if wit is None or not wit[side]:
            break
        mover = rng.choice(wit[side])
        other = rng.randrange(r0)
        if other == cluster_idx:
            continue
        swap_in = rng.choice(clusters[other])

        def apply_swap(a_cluster, a_vertex, b_cluster, b_vertex):
            clusters[a_cluster][clusters[a_cluster].index(a_vertex)] = b_vertex
            clusters[b_cluster][clusters[b_cluster].index(b_vertex)] = a_vertex

        apply_swap(cluster_idx, mover, other, swap_in)
        # only pairs touching the two swapped clusters can change
        touched = [
            (min(a, b), max(a, b))
            for a in (cluster_idx, other)
            for b in range(r0)
            if a != b
        ]
        new_local = {k: certify_pair(*k) for k in set(touched)}
        old_bad = sum(1 for k in set(touched) if k in refuted)
        new_bad = sum(1 for k, v in new_local.items() if v.verdict == "not-dense")
        if new_bad <= old_bad:
            certs.update(new_local)
            for k, v in new_local.items():
                if v.verdict == "not-dense":
                    refuted.add(k)
                else:
                    refuted.discard(k)
        else:  # undo
            apply_swap(cluster_idx, swap_in, other, mover)

    edges = set()
    for key, v in certs.items():
        if v.verdict in ("dense", "probably-dense"):
            edges.add(key)
    total_pairs = r0 * (r0 - 1) // 2
    stalled = len(refuted) > params.eps * total_pairs
    return ReducedGraph(
        clusters,
        v0,
        edges,
        certs,
        params,
        {"strategy": strategy, "refuted_pairs": len(refuted), "rounds": rounds, "stalled": stalled},
    )


def reduced_min_degree(rg: ReducedGraph, alpha: float, d: float, eps: float) -> dict:
    r = rg.r
    if r == 0:
        return {"ratio": 0.0, "threshold": alpha - d - eps, "meets": False}
    delta = min(rg.degree(i) for i in range(r))
    ratio = delta / r
    return {"min_degree": delta, "r": r, "ratio": ratio, "threshold": alpha - d - eps, "meets": ratio >= alpha - d - eps}


@dataclass
class LadderSearch:
    found: bool
    rungs: Optional[List[Tuple[int, int]]]  # (u-cluster, v-cluster) per step
    nodes: int
    budget: int


def find_spanning_ladder(rg: ReducedGraph, node_budget: int = 500_000) -> LadderSearch:
    """Backtracking search for a spanning ladder over the reduced graph.

    Consecutive rungs (a,b), (a',b') need edges a~b', a'~b and every rung
    needs its own edge.  Budget exhaustion is reported as failure, distinct
    from proven absence.
    """
    r2 = rg.r
    if r2 % 2 != 0:
        raise ValueError("reduced graph must have an even number of clusters; merge one into the exceptional set")
    steps = r2 // 2
    adj = [0] * r2
    for i in range(r2):
        for j in range(r2):
            if i != j and rg.has_edge(i, j):
                adj[i] |= 1 << j
    nodes = 0
    order = sorted(range(r2), key=lambda v: adj[v].bit_count())

    def extend(rungs: List[Tuple[int, int]], used: int) -> Optional[List[Tuple[int, int]]]:
        nonlocal nodes
        if len(rungs) == steps:
            return rungs
        if nodes >= node_budget:
            return None
        a_prev, b_prev = rungs[-1]
        for a in bits(adj[b_prev] & ~used):
            bs = adj[a] & adj[a_prev] & ~used & ~(1 << a)
            for b in bits(bs):
                nodes += 1
                if nodes >= node_budget:
                    return None
                res = extend(rungs + [(a, b)], used | (1 << a) | (1 << b))
                if res is not None:
                    return res
        return None

    for a in order:
        for b in bits(adj[a]):
            nodes += 1
            res = extend([(a, b)], (1 << a) | (1 << b))
            if res is not None:
                return LadderSearch(True, res, nodes, node_budget)
            if nodes >= node_budget:
                return LadderSearch(False, None, nodes, node_budget)
    return LadderSearch(False, None, nodes, node_budget)


@dataclass
class GParams:
    r: int
    t: int
    eta: float
    eta_prime: float
    d: float
    eps: float
    p: float
    gamma: float = 0.1


@dataclass
class GPartition:
    """Host clusters shaped like a spin graph, with density certificates."""

    spin: SpinGraph
    clusters: Dict[Role, List[int]]
    v0: List[int]
    params: GParams
    certificates: List[dict] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def cluster(self, kind: str, i: int, j: int = 0) -> List[int]:
        return self.clusters.get((kind, i, j), [])

    def assign(self) -> Dict[int, int]:
        out = {}
        for role, vs in self.clusters.items():
            sv = self.spin.index[role]
            for v in vs:
                out[v] = sv
        return out

    def to_json(self) -> dict:
        return {
            "params": self.params.__dict__,
            "v0": self.v0,
            "clusters": {f"{k} {i} {j}": sorted(vs) for (k, i, j), vs in sorted(self.clusters.items())},
            "certificates": self.certificates,
        }


def carve_clusters(
    host: Graph,
    rg: ReducedGraph,
    rungs: List[Tuple[int, int]],
    t: int,
    eta_prime: float,
    params: DensityParams,
    gamma: float = 0.1,
    eta: float = 0.3,
    mc_trials: int = 16,
    seed: int = 0,
) -> GPartition:
    """Carve balancing, connecting, and big clusters along a spanning ladder.

    Every rung needs a triangle apex in the reduced graph; apexes are chosen
    greedily by load, capped at floor(2/gamma) uses each.  Balancing sets are
    cut from the rung's u-cluster and from the apex, connecting sets from
    what remains of the u- and v-clusters; each spin-edge cluster pair is
    recorded as a sub-pair of a reduced edge (density inheritance) plus a
    fresh Monte Carlo certificate.
    """
    r = len(rungs)
    n = host.n
    s = math.ceil(eta_prime * n / (2 * r))
    if s < 1:
        raise ValueError("eta_prime too small: carved sets would be empty")
    cap = math.floor(2 / gamma)
    load: Dict[int, int] = {}
    apexes: List[int] = []
    low_guarantee = True
    u_side = {ui for ui, _ in rungs}
    for ui, vi in rungs:
        cands = [
            w
            for w in range(rg.r)
            if w not in (ui, vi) and rg.has_edge(w, ui) and rg.has_edge(w, vi) and load.get(w, 0) < cap
        ]
        if not cands:
            raise ValueError(f"rung ({ui},{vi}) lies in no usable triangle of the reduced graph")
        if len(cands) <= gamma * r:
            low_guarantee = False
        # least-loaded apex first; u-side clusters already pay the heaviest
        # carve bill, so prefer apexes off that side at equal load
        w = min(cands, key=lambda c: (load.get(c, 0), c in u_side, c))
        load[w] = load.get(w, 0) + 1
        apexes.append(w)

    remaining: List[List[int]] = [sorted(c) for c in rg.clusters]

    def take(cluster_idx: int, count: int, what: str) -> List[int]:
        pool = remaining[cluster_idx]
        if len(pool) < count:
            raise ValueError(
                f"cluster {cluster_idx} exhausted while carving {what}: "
                f"need {count}, have {len(pool)} (eta'-arithmetic violated)"
            )
        out, remaining[cluster_idx] = pool[:count], pool[count:]
        return out

    spin = spin_graph(r, t)
    clusters: Dict[Role, List[int]] = {}
    # balancing sets first, from every rung's u-cluster and apex
    for idx, ((ui, vi), w) in enumerate(zip(rungs, apexes), start=1):
        for j in range(1, t + 1):
            clusters[("b", idx, j)] = take(ui, s, f"b_({idx},{j})")
        for j in range(t + 1, 2 * t + 1):
            clusters[("bp", idx, j)] = take(ui, s, f"bp_({idx},{j})")
        for j in range(t + 1, 2 * t + 1):
            clusters[("b", idx, j)] = take(w, s, f"b_({idx},{j})")
        for j in range(1, t + 1):
            clusters[("bp", idx, j)] = take(w, s, f"bp_({idx},{j})")
    # then connecting sets and the big remainders
    for idx, (ui, vi) in enumerate(rungs, start=1):
        for j in range(1, 2 * t + 1):
            clusters[("c", idx, j)] = take(ui, s, f"c_({idx},{j})")
        clusters[("u", idx, 0)] = remaining[ui]
        remaining[ui] = []
        for j in range(1, 2 * t + 1):
            clusters[("cp", idx, j)] = take(vi, s, f"cp_({idx},{j})")
        clusters[("v", idx, 0)] = remaining[vi]
        remaining[vi] = []

    source_cluster: Dict[Role, int] = {}
    for idx, ((ui, vi), w) in enumerate(zip(rungs, apexes), start=1):
        for j in range(1, t + 1):
            source_cluster[("b", idx, j)] = ui
            source_cluster[("bp", idx, j)] = w
        for j in range(t + 1, 2 * t + 1):
            source_cluster[("b", idx, j)] = w
            source_cluster[("bp", idx, j)] = ui
        for j in range(1, 2 * t + 1):
            source_cluster[("c", idx, j)] = ui
            source_cluster[("cp", idx, j)] = vi
        source_cluster[("u", idx, 0)] = ui
        source_cluster[("v", idx, 0)] = vi

    rng = random.Random(seed)
    certificates: List[dict] = []
    cluster_sizes = [len(c) for c in rg.clusters]
    for a, b in spin.graph.edges():
        ra, rb = spin.role_of(a), spin.role_of(b)
        pa, pb = source_cluster[ra], source_cluster[rb]
        mu_a = len(clusters[ra]) / cluster_sizes[pa]
        mu_b = len(clusters[rb]) / cluster_sizes[pb]
        parent_edge = (min(pa, pb), max(pa, pb))
        mc = check_dense_mc(
            host, clusters[ra], clusters[rb], params, trials=mc_trials, seed=rng.randrange(1 << 30)
        )
        certificates.append(
            {
                "pair": [list(ra), list(rb)],
                "inherited_from": list(parent_edge),
                "parent_certified": parent_edge in rg.certificates
                and rg.certificates[parent_edge].verdict in ("dense", "probably-dense"),
                "mu": [mu_a, mu_b],
                "inherited_eps": params.eps / max(mu_a * mu_b, 1e-12),
                "mc": mc.to_json(),
            }
        )

    gparams = GParams(r=r, t=t, eta=eta, eta_prime=eta_prime, d=params.d, eps=params.eps, p=params.p, gamma=gamma)
    diagnostics = {"apexes": apexes, "apex_cap": cap, "triangle_guarantee_met": low_guarantee}
    return GPartition(spin, clusters, list(rg.v0), gparams, certificates, diagnostics)


def verify_G_partition(
    host: Graph,
    part: GPartition,
    mc_trials: int = 24,
    seed: int = 0,
    density_min_size: int = 0,
) -> dict:
    """Literal size checks plus re-evaluation of every spin-edge certificate.

    Pairs with a side smaller than `density_min_size` are recorded as gated
    instead of checked: density at such sizes carries no signal.
    """
    p = part.params
    n = host.n
    failures: List[dict] = []
    big_floor = (1 - p.eta) * n / (2 * p.r)
    small_floor = p.eta_prime * n / (2 * p.r)
    for i in range(1, p.r + 1):
        for kind in ("u", "v"):
            size = len(part.cluster(kind, i))
            if size < big_floor:
                failures.append({"check": "G1", "cluster": f"{kind}_{i}", "size": size, "floor": big_floor})
        for kind in ("c", "cp", "b", "bp"):
            for j in range(1, 2 * p.t + 1):
                size = len(part.cluster(kind, i, j))
                if size < small_floor:
                    failures.append(
                        {"check": "G2", "cluster": f"{kind}_({i},{j})", "size": size, "floor": small_floor}
                    )
    rng = random.Random(seed)
    dens = DensityParams(p=p.p, eps=p.eps, d=p.d)
    bad_pairs = 0
    gated_pairs = 0
    for a, b in part.spin.graph.edges():
        ra, rb = part.spin.role_of(a), part.spin.role_of(b)
        ca, cb = part.cluster(*_role_args(ra)), part.cluster(*_role_args(rb))
        if not ca or not cb:
            failures.append({"check": "G3", "pair": [list(ra), list(rb)], "reason": "empty cluster"})
            bad_pairs += 1
            continue
        if min(len(ca), len(cb)) < density_min_size:
            gated_pairs += 1
            continue
        if len(ca) + len(cb) <= 34:
            verdict = check_dense_exact(host, ca, cb, dens)
        else:
            verdict = check_dense_mc(host, ca, cb, dens, trials=mc_trials, seed=rng.randrange(1 << 30))
        if verdict.verdict == "not-dense":
            failures.append({"check": "G3", "pair": [list(ra), list(rb)], "witness": verdict.to_json()["witness"]})
            bad_pairs += 1
    return {
        "G1": {"holds": not [f for f in failures if f["check"] == "G1"], "floor": big_floor},
        "G2": {"holds": not [f for f in failures if f["check"] == "G2"], "floor": small_floor},
        "G3": {"holds": bad_pairs == 0, "refuted_pairs": bad_pairs, "gated_pairs": gated_pairs},
        "failures": failures,
        "all_ok": not failures,
    }


def _role_args(role: Role) -> Tuple[str, int, int]:
    return role[0], role[1], role[2]
