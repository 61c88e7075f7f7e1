"""Polychromatic embedding: k-bounded colorings of K_n, the unique-color
filter, degree-retention statistics, and the rainbow experiment pipeline."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .graphs import Graph, GuestSpec, gen_gnp, gen_guest
from .embed import FullEmbedResult, PipelineParams, full_embed
from .seeds import derive_seed


def _pair_index(u: int, v: int, n: int) -> int:
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


@dataclass
class EdgeColoring:
    """Coloring of all edges of K_n with no color used more than k times."""

    n: int
    k: int
    colors: np.ndarray  # int32 per pair index

    def color(self, u: int, v: int) -> int:
        return int(self.colors[_pair_index(u, v, self.n)])

    def class_sizes(self) -> Counter:
        return Counter(self.colors.tolist())

    def k_bound_ok(self) -> bool:
        return max(self.class_sizes().values()) <= self.k

    def to_lines(self) -> str:
        out = []
        for u in range(self.n):
            for v in range(u + 1, self.n):
                out.append(f"{u} {v} {self.color(u, v)}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_lines(cls, text: str, n: int, k: int) -> "EdgeColoring":
        colors = np.zeros(n * (n - 1) // 2, dtype=np.int64)
        for line in text.splitlines():
            if line.strip():
                u, v, c = (int(x) for x in line.split())
                colors[_pair_index(u, v, n)] = c
        return cls(n=n, k=k, colors=colors)


PATTERNS = ("random-balanced", "adversarial-local-clumps")


def gen_k_bounded(n: int, k: int, pattern: str = "random-balanced", seed: int = 0) -> EdgeColoring:
    """Color the C(n,2) edges of K_n with every color class of size <= k.

    random-balanced shuffles the edge slots and colors them in blocks of k;
    adversarial-local-clumps makes each color class a star fragment (all k
    edges share an endpoint), the stress case for within-star repeats.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if pattern not in PATTERNS:
        raise ValueError(f"unknown coloring pattern {pattern!r}")
    m = n * (n - 1) // 2
    colors = np.empty(m, dtype=np.int64)
    if pattern == "random-balanced":
        rng = np.random.default_rng(seed)
        perm = rng.permutation(m)
        for c, start in enumerate(range(0, m, k)):
            colors[perm[start : start + k]] = c
    else:
        c = 0
        filled = 0
        for u in range(n):
            run = 0
            for v in range(u + 1, n):
                colors[_pair_index(u, v, n)] = c
                run += 1
                filled += 1
                if run == k:
                    c += 1
                    run = 0
            if run:
                c += 1
    return EdgeColoring(n=n, k=k, colors=colors)


def gamma_phi(gamma: Graph, phi: EdgeColoring) -> Graph:
    """Keep exactly the edges whose color is unique within gamma.

    Every subgraph of the result is rainbow by construction.
    """
    if phi.n < gamma.n:
        raise ValueError("coloring does not cover the graph's vertex range")
    counts: Counter = Counter()
    for u, v in gamma.edges():
        counts[phi.color(u, v)] += 1
    out = Graph(gamma.n)
    for u, v in gamma.edges():
        if counts[phi.color(u, v)] == 1:
            out.add_edge(u, v)
    return out


def bunt_stats(gamma: Graph, phi: EdgeColoring) -> dict:
    """Per-vertex degree retention of the unique-color filter.

    For each vertex, deleted incident edges split into those whose color is
    unique within the vertex's star but repeated elsewhere, and those whose
    color already repeats within the star.  Reports the ratio against the
    2/3 retention threshold.
    """
    kept = gamma_phi(gamma, phi)
    global_counts: Counter = Counter()
    for u, v in gamma.edges():
        global_counts[phi.color(u, v)] += 1
    ratios: List[Optional[float]] = []
    n1 = [0] * gamma.n
    n2 = [0] * gamma.n
    violations = []
    for v in range(gamma.n):
        star_counts: Counter = Counter()
        for w in gamma.neighbors(v):
            star_counts[phi.color(v, w)] += 1
        for w in gamma.neighbors(v):
            c = phi.color(v, w)
            if global_counts[c] == 1:
                continue  # edge survives
            if star_counts[c] >= 2:
                n2[v] += 1
            else:
                n1[v] += 1
        deg = gamma.degree(v)
        ratio = kept.degree(v) / deg if deg else None
        ratios.append(ratio)
        if ratio is not None and ratio < 2 / 3:
            violations.append(v)
    finite = [r for r in ratios if r is not None]
    return {
        "min_ratio": min(finite) if finite else None,
        "mean_ratio": sum(finite) / len(finite) if finite else None,
        "violations_below_two_thirds": violations,
        "n1_total": sum(n1),
        "n2_total": sum(n2),
        "threshold": 2 / 3,
    }


@dataclass
class RainbowResult:
    ok: bool
    stage: str
    embed_result: Optional[FullEmbedResult]
    rainbow_certificate: Optional[List[Tuple[int, int, int]]]  # (host u, host v, color)
    stats: dict = field(default_factory=dict)

    def certificate_is_rainbow(self) -> bool:
        if not self.rainbow_certificate:
            return False
        cols = [c for _, _, c in self.rainbow_certificate]
        return len(cols) == len(set(cols))


def rainbow_experiment(
    n: int,
    k: int,
    p: float,
    guest: GuestSpec,
    seed: int = 0,
    pattern: str = "random-balanced",
    params: Optional[PipelineParams] = None,
) -> RainbowResult:
    """Color K_n, sample the random host, drop repeated-color edges, then run
    the full embedding pipeline; successes carry a rainbow certificate."""
    phi = gen_k_bounded(n, k, pattern=pattern, seed=derive_seed(seed, "coloring"))
    host = gen_gnp(n, p, seed=derive_seed(seed, "host"))
    filtered = gamma_phi(host, phi)
    stats = {
        "host_edges": host.m,
        "kept_edges": filtered.m,
        "kept_fraction": filtered.m / host.m if host.m else None,
    }
    hgraph, order = gen_guest(guest)
    if hgraph.n > filtered.n:
        return RainbowResult(False, "guest-too-large", None, None, stats)
    if params is None:
        params = PipelineParams()
    res = full_embed(filtered, hgraph, order, params, seed=derive_seed(seed, "embed"))
    if not res.ok:
        return RainbowResult(False, f"embed-{res.stage}", res, None, stats)
    cert = []
    for x, y in hgraph.edges():
        u, v = res.embedding[x], res.embedding[y]
        cert.append((min(u, v), max(u, v), phi.color(u, v)))
    out = RainbowResult(True, "done", res, sorted(cert), stats)
    if not out.certificate_is_rainbow():
        raise RuntimeError("embedded copy is not rainbow (internal bug: filter broken)")
    return out
