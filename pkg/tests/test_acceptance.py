"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest -s tests/test_acceptance.py -v` to see the lines live.
Tolerances are pinned here and nowhere else.
"""

import math
import random
import time
from collections import Counter

from oracles import (
    naive_Bad_lsets,
    naive_bad_lsets,
    naive_candidate_edges,
    naive_count_stars,
    naive_p_density,
)
from spinembed.bitset import bits
from spinembed.cli import main as cli_main
from spinembed.density import (
    Bad_lsets,
    DensityParams,
    SetFamily,
    bad_lsets,
    count_stars,
    gnp_stats,
    p_density,
)
from spinembed.embed import (
    PipelineParams,
    PlantedSizes,
    candidate_graph,
    full_embed,
    gen_aligned_guest,
    gen_planted_spin_host,
    verify_embedding,
)
from spinembed.graphs import Graph, GuestSpec, gen_gnp, gen_guest
from spinembed.hpartition import lolly_bounds_report, lolly_homomorphism, partition_H, verify_H_partition
from spinembed.lemma_suite import run_all
from spinembed.rainbow import gamma_phi, gen_k_bounded, rainbow_experiment
from spinembed.seeds import derive_seed


def report(number: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"[acceptance] criterion {number} ({name}): {'PASS' if ok else 'FAIL'} {detail}")


def test_criterion_1_deterministic_lemma_suite():
    t0 = time.perf_counter()
    results = run_all(scale=1.0)
    elapsed = time.perf_counter() - t0
    ok = all(r["passed"] for r in results) and elapsed < 60
    detail = f"({elapsed:.1f}s; " + ", ".join(f"{r['name']}={r['failures']} fail" for r in results) + ")"
    report(1, "deterministic lemma suite", ok, detail)
    assert elapsed < 60, f"suite took {elapsed:.1f}s"
    for r in results:
        assert r["passed"], r


def test_criterion_2_oracle_equivalence():
    mismatches = Counter()
    count = 1000

    for trial in range(count):
        rng = random.Random(derive_seed(2, "pd", trial))
        n = rng.randint(6, 50)
        g = gen_gnp(n, rng.uniform(0.1, 0.8), seed=trial)
        k = rng.randint(2, max(2, n // 2))
        pick = rng.sample(range(n), min(2 * k, n) // 2 * 2)
        u, w = pick[: len(pick) // 2], pick[len(pick) // 2 :]
        p = rng.uniform(0.1, 1.0)
        if abs(p_density(g, u, w, p) - naive_p_density(g, u, w, p)) > 1e-12:
            mismatches["p_density"] += 1

    for trial in range(count):
        rng = random.Random(derive_seed(2, "stars", trial))
        n = rng.randint(12, 50)
        g = gen_gnp(n, rng.uniform(0.2, 0.7), seed=trial ^ 0x5A)
        pick = rng.sample(range(n), 12)
        x = pick[:4]
        fam_sets = [tuple(sorted(pick[4 + 2 * i : 6 + 2 * i])) for i in range(4)]
        if count_stars(g, x, SetFamily(2, fam_sets)) != naive_count_stars(g, x, fam_sets):
            mismatches["count_stars"] += 1

    for trial in range(count):
        rng = random.Random(derive_seed(2, "cand", trial))
        nh_u, nh_v = rng.randint(2, 5), rng.randint(2, 5)
        h = Graph(nh_u + nh_v)
        for a in range(nh_u):
            for b in range(nh_u, nh_u + nh_v):
                if rng.random() < 0.4:
                    h.add_edge(a, b)
        ng_u, ng_v = rng.randint(3, 7), rng.randint(nh_v, 8)
        g = gen_gnp(ng_u + ng_v, rng.uniform(0.3, 0.8), seed=trial ^ 0xC4)
        gu = list(range(ng_u))
        gv = list(range(ng_u, ng_u + ng_v))
        f = dict(zip(range(nh_u, nh_u + nh_v), rng.sample(gv, nh_v)))
        cg = candidate_graph(h, list(range(nh_u)), list(range(nh_u, nh_u + nh_v)), g, gu, gv, f)
        mine = {(cg.left[i], cg.right[j]) for i in range(nh_u) for j in bits(cg.nbr[i])}
        if mine != naive_candidate_edges(h, list(range(nh_u)), list(range(nh_u, nh_u + nh_v)), g, gu, f):
            mismatches["candidate_graph"] += 1

    for trial in range(count):
        rng = random.Random(derive_seed(2, "bad", trial))
        ny, nz = rng.randint(3, 9), rng.randint(3, 9)
        g = gen_gnp(ny + nz, rng.uniform(0.2, 0.8), seed=trial ^ 0xBD)
        y, z = list(range(ny)), list(range(ny, ny + nz))
        ell = rng.randint(1, min(3, ny))
        p, eps, d = rng.uniform(0.2, 1.0), 0.2, rng.uniform(0.3, 0.8)
        params = DensityParams(p=p, eps=eps, d=d)
        mine = bad_lsets(g, y, z, ell, params).sets
        if mine != naive_bad_lsets(g, y, z, ell, p, eps, d):
            mismatches["bad_lsets"] += 1

    for trial in range(count):
        rng = random.Random(derive_seed(2, "Bad", trial))
        nx, ny, nz = rng.randint(3, 5), rng.randint(3, 5), rng.randint(3, 5)
        g = gen_gnp(nx + ny + nz, rng.uniform(0.3, 0.9), seed=trial ^ 0xBB)
        x = list(range(nx))
        y = list(range(nx, nx + ny))
        z = list(range(nx + ny, nx + ny + nz))
        params = DensityParams(p=1.0, eps=0.3, d=0.6)
        mine = Bad_lsets(g, x, y, z, 2, params).sets
        if mine != naive_Bad_lsets(g, x, y, z, 2, 1.0, 0.3, 0.6):
            mismatches["Bad_lsets"] += 1

    ok = not mismatches
    report(2, "oracle equivalence, 5 x 1000 fuzzed instances", ok, f"(mismatches: {dict(mismatches)})")
    assert ok, mismatches


def test_criterion_3_guest_partition_contract():
    failures = []
    runs = 0
    for trial in range(100):
        rng = random.Random(derive_seed(3, trial))
        delta = rng.choice([2, 3])
        kind = rng.choice(["path-union", "cycle-union", "random-bandwidth-bipartite", "grid-strip"])
        if kind == "grid-strip" and delta == 2:
            kind = "path-union"
        r = rng.choice([2, 3])
        eta = rng.uniform(0.3, 0.6)
        # feasible beta: the boundary-zone mass must fit under eta, so the
        # instance size needs m >= 16 * delta * w * 2r / eta (w = bandwidth)
        w = {"path-union": 1, "cycle-union": 2, "grid-strip": 2}.get(kind, 2)
        floor_m = math.ceil(16 * delta * w * 2 * r / eta)
        start = max(600, floor_m) + (max(600, floor_m) % 2)
        m = rng.randrange(start, 3001, 2)
        beta = w / m if kind == "random-bandwidth-bipartite" else 0.02
        guest, order = gen_guest(GuestSpec(m=m, delta=delta, beta=beta, kind=kind, seed=trial))
        part = partition_H(guest, order, r=r, eta=eta, delta=delta)
        runs += 1
        rep = verify_H_partition(guest, part)
        if not rep["all_ok"]:
            failures.append({"trial": trial, "kind": kind, "delta": delta, "failures": rep["failures"][:2]})
        if delta == 2 and part.t != 243:
            failures.append({"trial": trial, "t": part.t})
    ok = runs == 100 and not failures
    report(3, "guest partition (H1)-(H5) on 100 fuzzed guests", ok, f"({len(failures)} failures)")
    assert ok, failures[:3]


def test_criterion_4_lolly_bounds():
    from spinembed.hpartition import lolly_ell

    failures = []
    done = 0
    trial = 0
    while done < 100:
        trial += 1
        rng = random.Random(derive_seed(4, trial))
        eta_bar = rng.choice([0.25, 0.35, 0.5, 0.7, 0.85])
        m = rng.randint(lolly_ell(eta_bar) ** 2, 1200)
        g = Graph(m)
        pos = 0
        while pos < m - 1:
            seg = rng.randint(1, 10)
            for q in range(pos, min(pos + seg, m - 1)):
                g.add_edge(q, q + 1)
            pos += seg + rng.randint(1, 5)
        col = g.two_coloring()
        order = list(range(m))
        h = lolly_homomorphism(g, col, order, eta_bar)
        rep = lolly_bounds_report(g, col, order, eta_bar, h, slack=2)
        done += 1
        if not rep["all_ok"]:
            failures.append({"trial": trial, "m": m, "eta_bar": eta_bar, "sizes": rep["sizes"]})
    ok = not failures
    report(4, "lolly preimage bounds on 100 fuzzed blocks", ok, f"({len(failures)} failures)")
    assert ok, failures[:3]


def test_criterion_5_planted_end_to_end():
    combos = [(2, 2, 14), (2, 4, 12), (3, 2, 12), (3, 4, 12)]
    trials = 0
    wins = 0
    bad_successes = 0
    max_trial_seconds = 0.0
    for r, t, reps in combos:
        for k in range(reps):
            seed = derive_seed(5, r, t, k)
            t0 = time.perf_counter()
            host, truth = gen_planted_spin_host(
                r, t, PlantedSizes(big=320, connecting=84, balancing=84), d=0.5, p=0.3, seed=seed, eps=0.35
            )
            guest, order = gen_aligned_guest(truth, seed=seed ^ 1, fill=0.85)
            params = PipelineParams(delta=2, d=0.5, eps=0.35, p=0.3, t=t, blowup_parts=1)
            res = full_embed(host, guest, order, params, seed=seed ^ 2, gpart=truth)
            trials += 1
            if res.ok:
                wins += 1
                if not verify_embedding(guest, host, res.embedding):
                    bad_successes += 1
                if not res.reports.get("verified"):
                    bad_successes += 1
            max_trial_seconds = max(max_trial_seconds, time.perf_counter() - t0)
    rate = wins / trials
    ok = trials == 50 and rate >= 0.9 and bad_successes == 0 and max_trial_seconds <= 300
    report(
        5,
        "planted end-to-end embedding",
        ok,
        f"({wins}/{trials} succeeded, {bad_successes} unverified successes, "
        f"slowest trial {max_trial_seconds:.1f}s)",
    )
    assert trials == 50
    assert bad_successes == 0
    assert rate >= 0.9, f"success rate {rate:.2f}"
    assert max_trial_seconds <= 300


def test_criterion_6_star_bound_empirically():
    n, p, delta = 2000, 0.1, 2
    checks = 0
    holds = 0
    for s in range(50):
        g = gen_gnp(n, p, seed=derive_seed(6, s))
        rng = random.Random(derive_seed(6, "sets", s))
        for _ in range(100):
            sx = rng.randint(100, 450)
            sf = rng.randint(sx, (n - sx) // 2)
            perm = rng.sample(range(n), sx + 2 * sf)
            x = perm[:sx]
            fam = SetFamily(2, [tuple(sorted(perm[sx + 2 * i : sx + 2 * i + 2])) for i in range(sf)])
            checks += 1
            if count_stars(g, x, fam) <= 7 * p**delta * sx * sf:
                holds += 1
    rate = holds / checks
    ok = rate >= 0.98
    report(6, "star-count bound on G(2000, 0.1)", ok, f"({holds}/{checks} checks hold, rate {rate:.4f})")
    assert ok


def test_criterion_7_edge_statistics():
    n, p = 2000, 0.15
    good_seeds = 0
    for s in range(50):
        g = gen_gnp(n, p, seed=derive_seed(7, s))
        rng = random.Random(derive_seed(7, "sets", s))
        floor_sz = math.ceil(n / math.log(n))
        sx = rng.randint(floor_sz, 700)
        sy = rng.randint(floor_sz, 700)
        sz = rng.randint(floor_sz, n - floor_sz)
        perm = rng.sample(range(n), sx + sy)
        x, y = perm[:sx], perm[sx:]
        z = rng.sample(range(n), sz)
        rep = gnp_stats(g, x, y, z, p)
        if rep["in_regime"] and rep["all_within"]:
            good_seeds += 1
    ok = good_seeds >= 45  # 90% of 50
    report(7, "edge statistics within 1 +- 1/ln n", ok, f"({good_seeds}/50 seeds)")
    assert ok


def test_criterion_8_polychromatic_exactness():
    failures = 0
    rainbow_successes = 0
    rainbow_attempts = 0
    params = PipelineParams(delta=2, d=0.5, eps=0.3, p=1.0, t=2, r0=4, eta_prime=0.02, blowup_parts=1)
    for trial in range(200):
        rng = random.Random(derive_seed(8, trial))
        n = rng.randint(16, 80)
        k = rng.randint(1, 14)
        pattern = rng.choice(["random-balanced", "adversarial-local-clumps"])
        phi = gen_k_bounded(n, k, pattern=pattern, seed=trial)
        g = gen_gnp(n, rng.uniform(0.1, 0.7), seed=trial ^ 0x8)
        kept = gamma_phi(g, phi)
        counts = Counter(phi.color(u, v) for u, v in kept.edges())
        if counts and max(counts.values()) > 1:
            failures += 1
        if trial % 10 == 0:
            rainbow_attempts += 1
            spec = GuestSpec(m=176, delta=2, kind="path-union", seed=trial)
            k_run = rng.choice([1, 1, 2, 3])  # repeated colors mostly empty the filtered host
            res = rainbow_experiment(420, k_run, 1.0, spec, seed=trial, params=params)
            if res.ok:
                rainbow_successes += 1
                if not res.certificate_is_rainbow():
                    failures += 1
    ok = failures == 0 and rainbow_successes >= 5
    report(
        8,
        "polychromatic exactness",
        ok,
        f"({failures} failures over 200 runs; {rainbow_successes}/{rainbow_attempts} full rainbow runs succeeded)",
    )
    assert ok


def test_criterion_9_byte_determinism(tmp_path):
    args = [
        "sweep",
        "--n", "200", "--p", "1.0",
        "--gammas", "0.45,0.49",
        "--guest-m", "40", "--guest-kind", "path-union",
        "--eta-prime", "0.02", "--t", "2", "--r0", "4", "--eps", "0.3",
        "--seeds", "0,1",
        "--no-figures",
    ]
    assert cli_main(args + ["--out", str(tmp_path / "a"), "--workers", "1"]) == 0
    assert cli_main(args + ["--out", str(tmp_path / "b"), "--workers", "3"]) == 0
    assert cli_main(args + ["--out", str(tmp_path / "c"), "--workers", "1"]) == 0
    same = all(
        (tmp_path / "a" / name).read_bytes()
        == (tmp_path / "b" / name).read_bytes()
        == (tmp_path / "c" / name).read_bytes()
        for name in ("trials.jsonl", "summary.csv")
    )
    report(9, "byte-identical reruns incl. parallel", same)
    assert same
