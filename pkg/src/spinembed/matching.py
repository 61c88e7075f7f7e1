"""Bipartite matching on candidate graphs, with Hall deficiency witnesses."""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .bitset import bits, mask_of

INF = -1


@dataclass
class CandidateGraph:
    """Bipartite "who can host whom" graph.

    `left` are guest vertices, `right` host vertices; `nbr[i]` is a bitmask
    over right *indices* (not host ids).  `f` is the underlying injection of
    the guest's other class when the graph came from one.
    """

    left: List[int]
    right: List[int]
    nbr: List[int]
    f: Optional[Dict[int, int]] = None

    def __post_init__(self):
        if len(self.nbr) != len(self.left):
            raise ValueError("one neighborhood row per left vertex required")

    def degree(self, i: int) -> int:
        return self.nbr[i].bit_count()

    def neighborhood_of_set(self, idxs: Sequence[int]) -> int:
        out = 0
        for i in idxs:
            out |= self.nbr[i]
        return out

    def edge_count(self, left_idxs: Sequence[int], right_mask: int) -> int:
        return sum((self.nbr[i] & right_mask).bit_count() for i in left_idxs)


def neighborhood_distance(b1: CandidateGraph, b2: CandidateGraph) -> int:
    """Number of left vertices whose candidate neighborhoods differ."""
    if b1.left != b2.left or b1.right != b2.right:
        raise ValueError("neighborhood distance needs identical vertex sets")
    return sum(1 for x, y in zip(b1.nbr, b2.nbr) if x != y)


@dataclass
class MatchResult:
    matching: Dict[int, int]  # left id -> right id
    covers_left: bool
    deficient: Optional[List[int]] = None  # left ids violating Hall when not covered

    def to_json(self) -> dict:
        return {
            "matching": sorted(self.matching.items()),
            "covers_left": self.covers_left,
            "deficient": self.deficient,
        }


def hall_matching(b: CandidateGraph) -> MatchResult:
    """Maximum matching via Hopcroft-Karp; on failure returns a deficient set.

    The deficient witness S satisfies |N(S)| < |S| (Koenig: unmatched left
    vertices plus everything alternating-reachable from them).
    """
    nl = len(b.left)
    match_l: List[Optional[int]] = [None] * nl  # left idx -> right idx
    match_r: Dict[int, int] = {}  # right idx -> left idx
    dist = [0] * nl

    def bfs() -> bool:
        q = deque()
        for i in range(nl):
            if match_l[i] is None:
                dist[i] = 0
                q.append(i)
            else:
                dist[i] = INF
        found = False
        while q:
            i = q.popleft()
            for j in bits(b.nbr[i]):
                owner = match_r.get(j)
                if owner is None:
                    found = True
                elif dist[owner] == INF:
                    dist[owner] = dist[i] + 1
                    q.append(owner)
        return found

    def dfs(i: int) -> bool:
        for j in bits(b.nbr[i]):
            owner = match_r.get(j)
            if owner is None or (dist[owner] == dist[i] + 1 and dfs(owner)):
                match_l[i] = j
                match_r[j] = i
                return True
        dist[i] = INF
        return False

    while bfs():
        for i in range(nl):
            if match_l[i] is None:
                dfs(i)

    if all(m is not None for m in match_l):
        return MatchResult({b.left[i]: b.right[match_l[i]] for i in range(nl)}, True)

    # alternating reachability from unmatched left vertices
    reach_l = [match_l[i] is None for i in range(nl)]
    frontier = [i for i in range(nl) if reach_l[i]]
    seen_r = 0
    while frontier:
        nxt = []
        for i in frontier:
            fresh = b.nbr[i] & ~seen_r
            seen_r |= fresh
            for j in bits(fresh):
                owner = match_r.get(j)
                if owner is not None and not reach_l[owner]:
                    reach_l[owner] = True
                    nxt.append(owner)
        frontier = nxt
    witness = [b.left[i] for i in range(nl) if reach_l[i]]
    matching = {b.left[i]: b.right[match_l[i]] for i in range(nl) if match_l[i] is not None}
    return MatchResult(matching, False, deficient=witness)


def _min_uncovered(b: CandidateGraph, sbar_idxs: Sequence[int], z_size: int) -> int:
    """max over |Z| = z_size of #{i in sbar: N(i) subset Z}, by exhaustive Z enumeration."""
    rights = list(range(len(b.right)))
    best = 0
    for Z in itertools.combinations(rights, z_size):
        zm = mask_of(Z)
        cnt = sum(1 for i in sbar_idxs if not (b.nbr[i] & ~zm))
        if cnt > best:
            best = cnt
    return best


def check_matching_conditions(
    b: CandidateGraph,
    b_prime: CandidateGraph,
    s: int,
    x: int,
    n1: int,
    n2: int,
    n3: int,
    exhaustive_limit: int = 1 << 17,
    sample_trials: int = 200,
    seed: int = 0,
) -> dict:
    """Evaluate the four matching-lemma hypotheses on (b, b_prime).

    (i) min degree >= n1 in b_prime; (ii) |N(S)| >= x|S| for all |S| <= n2;
    (iii) e(S, T) <= (n1/n3)|S||T| for x*n2 <= |T| < |S| < n3;
    (iv) |N_b(T) cap S| > s for |S| >= n3 and |T| > |U| - |S|.
    Each condition records whether it was checked exhaustively or by sampling.
    """
    nd = neighborhood_distance(b, b_prime)
    if nd > s:
        raise ValueError(f"neighborhood distance {nd} exceeds s={s}")
    nl, nr = len(b.left), len(b.right)
    rng = random.Random(seed)
    report: dict = {"ndist": nd, "params": {"s": s, "x": x, "n1": n1, "n2": n2, "n3": n3}}

    degs = [b_prime.degree(i) for i in range(nl)]
    bad_i = [b_prime.left[i] for i in range(nl) if degs[i] < n1]
    report["i"] = {"holds": not bad_i, "mode": "exhaustive", "witness": bad_i[:5]}

    def subset_count(k):
        from math import comb

        return sum(comb(nl, j) for j in range(1, k + 1))

    n2_eff = min(n2, nl)
    mode_ii = "exhaustive" if subset_count(n2_eff) <= exhaustive_limit else "sampled"
    holds_ii, wit_ii = True, None
    if mode_ii == "exhaustive":
        for k in range(1, n2_eff + 1):
            for S in itertools.combinations(range(nl), k):
                if b_prime.neighborhood_of_set(S).bit_count() < x * k:
                    holds_ii, wit_ii = False, [b_prime.left[i] for i in S]
                    break
            if not holds_ii:
                break
    else:
        for _ in range(sample_trials):
            k = rng.randint(1, n2_eff)
            S = rng.sample(range(nl), k)
            if b_prime.neighborhood_of_set(S).bit_count() < x * k:
                holds_ii, wit_ii = False, [b_prime.left[i] for i in S]
                break
    report["ii"] = {"holds": holds_ii, "mode": mode_ii, "witness": wit_ii}

    # (iii): for a fixed S the adversarial T of size b keeps the b highest
    # degrees into S, so the T side collapses to a sorted prefix.
    lo_t = x * n2
    holds_iii, wit_iii = True, None
    mode_iii = "exhaustive" if (1 << nl) <= exhaustive_limit else "sampled"

    def worst_T_ok(S: Sequence[int]) -> bool:
        nonlocal wit_iii
        size_s = len(S)
        if not (lo_t < size_s < n3):
            return True
        col_sums = sorted((sum((b_prime.nbr[i] >> j) & 1 for i in S) for j in range(nr)), reverse=True)
        run = 0
        for bidx, csum in enumerate(col_sums, start=1):
            run += csum
            if lo_t <= bidx < size_s and run > (n1 / n3) * size_s * bidx:
                wit_iii = {"S_size": size_s, "T_size": bidx}
                return False
        return True

    if mode_iii == "exhaustive":
        for size_s in range(max(int(lo_t) + 1, 1), min(n3, nl + 1)):
            for S in itertools.combinations(range(nl), size_s):
                if not worst_T_ok(S):
                    holds_iii = False
                    break
            if not holds_iii:
                break
    else:
        for _ in range(sample_trials):
            size_s = rng.randint(max(int(lo_t) + 1, 1), max(min(n3 - 1, nl), 1))
            S = rng.sample(range(nl), min(size_s, nl))
            if not worst_T_ok(S):
                holds_iii = False
                break
    report["iii"] = {"holds": holds_iii, "mode": mode_iii, "witness": wit_iii}

    # (iv): for fixed S, the adversarial T avoids as many left neighborhoods
    # as possible; equivalently choose Z = complement of T with |Z| = |S|-1
    # maximizing #{i in S: N_b(i) subset Z}.
    holds_iv, wit_iv = True, None
    from math import comb

    cost = sum(
        comb(nl, k) * comb(nr, min(k - 1, nr)) for k in range(n3, nl + 1)
    )
    mode_iv = "exhaustive" if cost <= exhaustive_limit else "sampled"
    if mode_iv == "exhaustive":
        for size_s in range(n3, nl + 1):
            z_size = size_s - 1
            if z_size > nr:
                continue
            for S in itertools.combinations(range(nl), size_s):
                uncovered = _min_uncovered(b, S, z_size)
                if size_s - uncovered <= s:
                    holds_iv = False
                    wit_iv = {"S_size": size_s, "hits": size_s - uncovered}
                    break
            if not holds_iv:
                break
    else:
        for _ in range(sample_trials):
            size_s = rng.randint(min(n3, nl), nl)
            S = rng.sample(range(nl), size_s)
            t_size = nr - size_s + 2
            if t_size < 1 or t_size > nr:
                continue
            T = mask_of(rng.sample(range(nr), t_size))
            hits = sum(1 for i in S if b.nbr[i] & T)
            if hits <= s:
                holds_iv = False
                wit_iv = {"S_size": size_s, "hits": hits}
                break
    report["iv"] = {"holds": holds_iv, "mode": mode_iv, "witness": wit_iv}

    report["all_hold"] = all(report[k]["holds"] for k in ("i", "ii", "iii", "iv"))
    report["all_exhaustive"] = all(report[k]["mode"] == "exhaustive" for k in ("i", "ii", "iii", "iv"))
    return report
