"""Deterministic-lemma suite.

Each entry exercises a statement that holds deterministically (no a.a.s.
qualifier) on randomized instances: the switching-distance bound on
candidate graphs, the corruption count bound, the matching conditions
implying a covering matching, sub-pair inheritance and typical-vertex counts
for exactly certified dense pairs, and the one-crossing cut bound.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import List, Tuple

from .bitset import mask_of
from .density import DensityParams, SetFamily, check_dense_exact, corrupted_vertices, crosscut_partition
from .embed import candidate_graph
from .graphs import Graph, gen_gnp
from .matching import CandidateGraph, check_matching_conditions, hall_matching, neighborhood_distance
from .seeds import derive_seed


def _random_bipartite(rng: random.Random, left: int, right: int, p: float, max_deg: int = 10**9) -> Graph:
    g = Graph(left + right)
    for u in range(left):
        for v in range(left, left + right):
            if rng.random() < p and g.degree(u) < max_deg and g.degree(v) < max_deg:
                g.add_edge(u, v)
    return g


def switching_bound_suite(count: int = 500, seed: int = 101) -> dict:
    """Random (H, G, f) instances with s random switchings: the candidate
    graphs before and after differ in at most 2*s*Delta left neighborhoods."""
    failures = 0
    for trial in range(count):
        rng = random.Random(derive_seed(seed, "switch", trial))
        nu, nv = rng.randint(4, 9), rng.randint(6, 12)
        gu, gv = rng.randint(8, 14), rng.randint(nv + 1, 18)
        h = _random_bipartite(rng, nu, nv, rng.uniform(0.15, 0.5), max_deg=3)
        g = gen_gnp(gu + gv, rng.uniform(0.3, 0.8), seed=derive_seed(seed, "host", trial))
        hu = list(range(nu))
        hv = list(range(nu, nu + nv))
        gu_list = list(range(gu))
        gv_list = list(range(gu, gu + gv))
        f = dict(zip(hv, rng.sample(gv_list, nv)))
        s = rng.randint(0, 20)
        f2 = dict(f)
        for _ in range(s):
            a, b = rng.sample(hv, 2)
            f2[a], f2[b] = f2[b], f2[a]
        delta_v = max((h.adj[x] & mask_of(hu)).bit_count() for x in hv)
        b1 = candidate_graph(h, hu, hv, g, gu_list, gv_list, f)
        b2 = candidate_graph(h, hu, hv, g, gu_list, gv_list, f2)
        if neighborhood_distance(b1, b2) > 2 * s * max(delta_v, 1):
            failures += 1
    return {"name": "switching-distance bound", "count": count, "failures": failures, "passed": failures == 0}


def corruption_bound_suite(count: int = 200, seed: int = 202) -> dict:
    """|family| <= mu n^Delta implies at most (Delta!/eta^(Delta-1)) mu n
    vertices are eta*n-corrupted."""
    failures = 0
    for trial in range(count):
        rng = random.Random(derive_seed(seed, "corrupt", trial))
        n = rng.randint(20, 60)
        delta = rng.randint(2, 3)
        sets = set()
        for _ in range(rng.randint(5, min(120, math.comb(n, delta)))):
            sets.add(tuple(sorted(rng.sample(range(n), delta))))
        fam = SetFamily(delta, sorted(sets))
        mu = len(fam.sets) / n**delta
        eta = rng.uniform(0.1, 0.5)
        corrupted = corrupted_vertices(range(n), fam, eta * n)
        bound = (math.factorial(delta) / eta ** (delta - 1)) * mu * n
        if len(corrupted) > bound:
            failures += 1
    return {"name": "corruption count bound", "count": count, "failures": failures, "passed": failures == 0}


def _exact_min_hits(b: CandidateGraph, sbar: Tuple[int, ...], z_size: int) -> int:
    """min over |S| = |U| - z_size of |N_b(S) cap sbar|, exactly."""
    nr = len(b.right)
    best_uncovered = 0
    for Z in itertools.combinations(range(nr), z_size):
        zm = mask_of(Z)
        uncovered = sum(1 for i in sbar if not (b.nbr[i] & ~zm))
        if uncovered > best_uncovered:
            best_uncovered = uncovered
    return len(sbar) - best_uncovered


def matching_conditions_suite(count: int = 300, seed: int = 303) -> dict:
    """Instances where the four matching hypotheses verify exhaustively must
    always admit a matching covering the left class."""
    verified = 0
    failures = 0
    attempts = 0
    rng_master = random.Random(seed)
    while verified < count and attempts < 40 * count:
        attempts += 1
        rng = random.Random(derive_seed(seed, "match", attempts))
        nl = rng.randint(5, 8)
        nr = rng.randint(nl + 1, nl + 5)
        p_edge = rng.uniform(0.45, 0.85)
        nbr = []
        for _ in range(nl):
            row = 0
            for j in range(nr):
                if rng.random() < p_edge:
                    row |= 1 << j
            nbr.append(row)
        b = CandidateGraph(left=list(range(nl)), right=list(range(100, 100 + nr)), nbr=nbr)
        # perturb a few rows to get a genuinely distinct second graph
        nbr2 = list(nbr)
        flips = rng.randint(0, 1)
        for _ in range(flips):
            i = rng.randrange(nl)
            j = rng.randrange(nr)
            nbr2[i] = nbr2[i] | (1 << j)
        b2 = CandidateGraph(left=list(range(nl)), right=list(range(100, 100 + nr)), nbr=nbr2)

        n1 = min(r.bit_count() for r in nbr2)
        if n1 < 1:
            continue
        n2 = 2
        x = min(
            (b2.neighborhood_of_set(S).bit_count() // len(S))
            for size in (1, 2)
            for S in itertools.combinations(range(nl), size)
        )
        if x < 1:
            continue
        n3 = nl - 1
        min_hits = min(
            (
                _exact_min_hits(b, S, len(S) - 1)
                for size in range(n3, nl + 1)
                for S in itertools.combinations(range(nl), size)
                if len(S) - 1 <= nr
            ),
            default=0,
        )
        s = min_hits - 1
        if s < 0:
            continue
        if neighborhood_distance(b, b2) > s:
            continue
        report = check_matching_conditions(b, b2, s=s, x=x, n1=n1, n2=n2, n3=n3)
        if not (report["all_hold"] and report["all_exhaustive"]):
            continue
        verified += 1
        if not hall_matching(b2).covers_left:
            failures += 1
    return {
        "name": "matching conditions imply covering matching",
        "count": verified,
        "failures": failures,
        "attempts": attempts,
        "passed": failures == 0 and verified >= count,
    }


def dense_pair_props_suite(count: int = 200, seed: int = 404) -> dict:
    """On exactly certified dense pairs: sub-pair inheritance at eps/mu and
    the typical-vertex count below eps |X|."""
    verified = 0
    failures = 0
    attempts = 0
    while verified < count and attempts < 30 * count:
        attempts += 1
        rng = random.Random(derive_seed(seed, "dense", attempts))
        nx, ny = rng.randint(6, 10), rng.randint(6, 10)
        g = _random_bipartite(rng, nx, ny, rng.uniform(0.75, 0.95))
        X = list(range(nx))
        Y = list(range(nx, nx + ny))
        params = DensityParams(p=1.0, eps=0.15, d=0.4)
        if check_dense_exact(g, X, Y, params).verdict != "dense":
            continue
        verified += 1
        keep = math.ceil(nx / 2)
        xs = sorted(rng.sample(X, keep))
        mu = keep / nx
        sub_params = DensityParams(p=1.0, eps=min(params.eps / mu, params.d - 1e-9), d=params.d)
        if check_dense_exact(g, xs, Y, sub_params).verdict != "dense":
            failures += 1
            continue
        ym = mask_of(Y)
        low = sum(1 for v in X if (g.adj[v] & ym).bit_count() < (params.d - params.eps) * 1.0 * ny)
        if not low < params.eps * nx:
            failures += 1
    return {
        "name": "sub-pair inheritance and typical vertices",
        "count": verified,
        "failures": failures,
        "attempts": attempts,
        "passed": failures == 0 and verified >= count,
    }


def crosscut_suite(count: int = 200, seed: int = 505) -> dict:
    """The returned one-third cut always meets the m*ell/2^(ell+2) bound."""
    failures = 0
    for trial in range(count):
        rng = random.Random(derive_seed(seed, "cut", trial))
        ell = rng.randint(2, 4)
        n = rng.randint(3 * ell, 40)
        m_sets = rng.randint(0, min(40, math.comb(n, ell)))
        sets = set()
        while len(sets) < m_sets:
            sets.add(tuple(sorted(rng.sample(range(n), ell))))
        fam = SetFamily(ell, sorted(sets))
        v1, v2 = crosscut_partition(fam, range(n))
        if len(v1) != (2 * n) // 3 or len(v2) != math.ceil(n / 3):
            failures += 1
            continue
        v2set = set(v2)
        crossing = sum(1 for S in fam.sets if sum(1 for v in S if v in v2set) == 1)
        if crossing < len(fam.sets) * ell / 2 ** (ell + 2):
            failures += 1
    return {"name": "one-crossing cut bound", "count": count, "failures": failures, "passed": failures == 0}


def run_all(scale: float = 1.0) -> List[dict]:
    """Run every deterministic check; scale shrinks instance counts for smoke runs."""
    s = lambda k: max(5, int(k * scale))
    return [
        switching_bound_suite(s(500)),
        corruption_bound_suite(s(200)),
        matching_conditions_suite(s(300)),
        dense_pair_props_suite(s(200)),
        crosscut_suite(s(200)),
    ]
