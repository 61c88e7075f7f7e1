import math
import random

import pytest

from oracles import (
    naive_Bad_lsets,
    naive_bad_lsets,
    naive_corrupted,
    naive_count_stars,
    naive_dense_exact,
    naive_p_density,
)
from spinembed.density import (
    Bad_lsets,
    DensityParams,
    SetFamily,
    bad_lsets,
    check_boundedness,
    check_dense_exact,
    check_dense_mc,
    check_expansion,
    corrupted_vertices,
    count_stars,
    crosscut_partition,
    gnp_stats,
    p_density,
)
from spinembed.graphs import Graph, gen_gnp


def complete_bipartite(a, b):
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def half_graph(k):
    # u_i ~ w_j iff i <= j
    g = Graph(2 * k)
    for i in range(k):
        for j in range(i, k):
            g.add_edge(i, k + j)
    return g


def test_p_density_complete_bipartite():
    g = complete_bipartite(3, 3)
    assert p_density(g, [0, 1, 2], [3, 4, 5], 1.0) == 1.0


def test_p_density_no_edges():
    g = Graph(6)
    assert p_density(g, [0, 1], [2, 3], 0.5) == 0.0


def test_p_density_matches_naive_oracle():
    g = gen_gnp(100, 0.2, seed=5)
    rng = random.Random(1)
    verts = rng.sample(range(100), 60)
    u, w = verts[:30], verts[30:]
    assert p_density(g, u, w, 0.2) == pytest.approx(naive_p_density(g, u, w, 0.2))


def test_p_density_rejects_bad_sets():
    g = Graph(4, [(0, 1)])
    with pytest.raises(ValueError):
        p_density(g, [], [1], 0.5)
    with pytest.raises(ValueError):
        p_density(g, [0, 1], [1, 2], 0.5)


def test_dense_exact_complete_pair():
    g = complete_bipartite(6, 6)
    v = check_dense_exact(g, range(6), range(6, 12), DensityParams(p=1.0, eps=0.1, d=1.0))
    assert v.verdict == "dense"


def test_dense_exact_empty_pair_has_witness():
    g = Graph(8)
    v = check_dense_exact(g, range(4), range(4, 8), DensityParams(p=1.0, eps=0.1, d=0.5))
    assert v.verdict == "not-dense"
    wu, ww = v.witness
    assert p_density(g, wu, ww, 1.0) < 0.4


def test_dense_exact_half_graph_matches_full_enumeration():
    g = half_graph(8)
    params = DensityParams(p=1.0, eps=0.25, d=0.5)
    mine = check_dense_exact(g, range(8), range(8, 16), params)
    truth = naive_dense_exact(g, list(range(8)), list(range(8, 16)), 1.0, 0.25, 0.5)
    assert (mine.verdict == "dense") == truth
    if mine.verdict == "not-dense":
        wu, ww = mine.witness
        assert p_density(g, wu, ww, 1.0) < 0.25


def test_dense_exact_witnesses_violate_density():
    for seed in range(20):
        g = gen_gnp(16, 0.45, seed=seed)
        params = DensityParams(p=1.0, eps=0.3, d=0.6)
        v = check_dense_exact(g, range(8), range(8, 16), params)
        if v.verdict == "not-dense":
            wu, ww = v.witness
            assert len(wu) >= math.ceil(0.3 * 8) and len(ww) >= math.ceil(0.3 * 8)
            assert p_density(g, wu, ww, 1.0) < 0.3


def test_dense_exact_size_guard():
    g = complete_bipartite(20, 20)
    with pytest.raises(ValueError):
        check_dense_exact(g, range(20), range(20, 40), DensityParams(p=1.0, eps=0.1, d=0.5))


def test_dense_mc_needs_trials():
    g = complete_bipartite(4, 4)
    with pytest.raises(ValueError):
        check_dense_mc(g, range(4), range(4, 8), DensityParams(p=1.0, eps=0.1, d=0.5), trials=0)


def test_dense_mc_complete_pair_probably_dense():
    g = complete_bipartite(10, 10)
    v = check_dense_mc(g, range(10), range(10, 20), DensityParams(p=1.0, eps=0.2, d=0.9), trials=50, seed=3)
    assert v.verdict == "probably-dense"
    assert "sampled sizes" in v.note


def test_dense_mc_finds_planted_sparse_spot():
    # zero out a half-size block of a complete pair; the exact checker refutes
    # and the sampler should find a threshold-size violation most of the time
    a = b = 10
    eps = 0.5
    found = 0
    for seed in range(100):
        g = complete_bipartite(a, b)
        hole_u = range(5)
        hole_w = range(a, a + 5)
        for u in hole_u:
            for w in hole_w:
                g.remove_edge(u, w)
        params = DensityParams(p=1.0, eps=eps, d=0.9)
        assert check_dense_exact(g, range(a), range(a, a + b), params).verdict == "not-dense"
        v = check_dense_mc(g, range(a), range(a, a + b), params, trials=100, seed=seed)
        found += v.verdict == "not-dense"
    assert found >= 50


def test_count_stars_examples():
    g = Graph(3, [(0, 1), (0, 2)])
    fam = SetFamily(2, [(1, 2)])
    assert count_stars(g, [0], fam) == 1
    g2 = Graph(3, [(0, 1)])
    assert count_stars(g2, [0], fam) == 0


def test_count_stars_matches_naive_oracle():
    g = gen_gnp(60, 0.5, seed=2)
    rng = random.Random(4)
    pick = rng.sample(range(60), 20)
    x, rest = pick[:10], pick[10:]
    fam_sets = [tuple(rest[i : i + 2]) for i in range(0, 10, 2)]
    fam = SetFamily(2, fam_sets)
    assert count_stars(g, x, fam) == naive_count_stars(g, x, fam_sets)


def test_count_stars_rejects_overlap():
    g = Graph(4)
    with pytest.raises(ValueError):
        count_stars(g, [0], SetFamily(2, [(0, 1)]))
    with pytest.raises(ValueError):
        count_stars(g, [3], SetFamily(2, [(0, 1), (1, 2)]))


def test_bad_lsets_full_adjacency_gives_empty_family():
    g = complete_bipartite(4, 5)
    fam = bad_lsets(g, range(4), range(4, 9), 2, DensityParams(p=1.0, eps=0.5, d=1.0))
    assert len(fam) == 0


def test_bad_lsets_isolated_vertices_all_bad():
    g = Graph(10)
    fam = bad_lsets(g, range(4), range(4, 10), 2, DensityParams(p=1.0, eps=0.1, d=0.5))
    assert len(fam) == math.comb(4, 2)


def test_bad_lsets_matches_independent_oracle():
    g = gen_gnp(40, 0.4, seed=9)
    y, z = list(range(12)), list(range(12, 27))
    params = DensityParams(p=0.4, eps=0.1, d=0.4)
    mine = bad_lsets(g, y, z, 2, params)
    assert mine.sets == naive_bad_lsets(g, y, z, 2, 0.4, 0.1, 0.4)


def test_Bad_lsets_trivial_cases():
    g = Graph(12)
    # y complete to x and z, z dense to y
    for a in range(4):
        for b in range(4, 8):
            g.add_edge(a, b)
    for b in range(4, 8):
        for c in range(8, 12):
            g.add_edge(b, c)
    params = DensityParams(p=1.0, eps=0.3, d=0.6)
    fam = Bad_lsets(g, range(4), range(4, 8), range(8, 12), 2, params)
    assert len(fam) == 0
    # one x vertex with no y-neighbors poisons every pair through it
    g2 = g.copy()
    for b in range(4, 8):
        g2.remove_edge(0, b)
    fam2 = Bad_lsets(g2, range(4), range(4, 8), range(8, 12), 2, params)
    assert all(0 in s for s in fam2.sets) and len(fam2) == 3
    assert fam2.reasons[0]["mode"] == "small-neighbourhood"


def test_Bad_lsets_matches_subset_enumeration_oracle():
    for seed in range(6):
        g = gen_gnp(20, 0.55, seed=seed)
        x, y, z = list(range(6)), list(range(6, 13)), list(range(13, 20))
        params = DensityParams(p=1.0, eps=0.3, d=0.6)
        mine = Bad_lsets(g, x, y, z, 2, params)
        truth = naive_Bad_lsets(g, x, y, z, 2, 1.0, 0.3, 0.6)
        assert mine.sets == truth


def test_corrupted_vertices_examples():
    assert corrupted_vertices(range(5), SetFamily(2, []), 3) == []
    got = corrupted_vertices(range(5), SetFamily(2, [(1, 2)]), 0)
    assert got == [1, 2]


def test_corrupted_vertices_matches_recursive_oracle_and_bound():
    for seed in range(25):
        rng = random.Random(seed)
        n, delta = 10, 3
        sets = set()
        while len(sets) < 30:
            sets.add(tuple(sorted(rng.sample(range(n), delta))))
        fam = SetFamily(delta, sorted(sets))
        x = 2
        got = corrupted_vertices(range(n), fam, x)
        assert set(got) == naive_corrupted(range(n), fam.sets, delta, x)
        # deterministic corruption-count bound with x = eta * n
        eta = 0.3
        mu = len(fam.sets) / n**delta
        got_eta = corrupted_vertices(range(n), fam, eta * n)
        assert len(got_eta) <= (math.factorial(delta) / eta ** (delta - 1)) * mu * n


def test_check_expansion_complete_pair():
    g = complete_bipartite(6, 8)
    rep = check_expansion(
        g, range(6), range(6, 14), DensityParams(p=1.0, eps=0.2, d=0.9), cap=1, factor=8.0, trials=10, ell=2
    )
    assert rep["min_ratio"] == 8.0 and rep["meets_factor"]


def test_check_expansion_vacuous_when_no_good_sets():
    g = Graph(14)
    rep = check_expansion(
        g, range(6), range(6, 14), DensityParams(p=1.0, eps=0.2, d=0.9), cap=2, factor=1.0, trials=5
    )
    assert rep["vacuous"]


def test_check_expansion_deterministic_per_seed():
    g = gen_gnp(300, 0.3, seed=7)
    params = DensityParams(p=0.3, eps=0.2, d=0.5)
    a = check_expansion(g, range(100), range(100, 220), params, cap=5, factor=1.0, trials=20, seed=13)
    b = check_expansion(g, range(100), range(100, 220), params, cap=5, factor=1.0, trials=20, seed=13)
    assert a == b


def test_check_boundedness_empty_and_complete():
    rep = check_boundedness(Graph(40), eta=0.2, k_factor=1.0, p=0.5, trials=10)
    assert rep["max_ratio"] == 0.0 and rep["bounded"]
    kn = Graph(30, [(i, j) for i in range(30) for j in range(i + 1, 30)])
    rep2 = check_boundedness(kn, eta=0.2, k_factor=1.01, p=1.0, trials=20)
    assert rep2["max_ratio"] <= 1.0 and rep2["bounded"]


def test_check_boundedness_guards():
    with pytest.raises(ValueError):
        check_boundedness(Graph(10), eta=0.01, k_factor=1.0, p=0.5, trials=5)


def test_gnp_stats_out_of_regime_flag():
    g = gen_gnp(50, 0.5, seed=1)
    rep = gnp_stats(g, [], range(10, 30), range(30, 45), 0.5)
    assert not rep["in_regime"]


def test_gnp_stats_complete_graph_exact():
    n = 40
    kn = Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    x = list(range(14))
    y = list(range(14, 28))
    z = list(range(28, n))
    rep = gnp_stats(kn, x, y, z, 1.0)
    assert rep["ratios"]["edges_x_y"] == pytest.approx(1.0)
    assert rep["ratios"]["edges_within_x"] == pytest.approx(1.0)
    # degree-sum prediction p|Z|n counts the (n-1) true degree against n
    assert rep["ratios"]["degree_sum_z"] == pytest.approx((n - 1) / n)


def test_crosscut_single_pair():
    fam = SetFamily(2, [(0, 1)])
    v1, v2 = crosscut_partition(fam, range(6))
    assert len(v1) == 4 and len(v2) == 2
    assert sum(1 for v in (0, 1) if v in set(v2)) == 1  # bound 2/16 rounds up to one crossing


def test_crosscut_empty_family():
    v1, v2 = crosscut_partition(SetFamily(3, []), range(9))
    assert len(v1) == 6 and len(v2) == 3


def test_crosscut_meets_bound_on_random_family():
    rng = random.Random(0)
    sets = set()
    while len(sets) < 40:
        sets.add(tuple(sorted(rng.sample(range(30), 3))))
    fam = SetFamily(3, sorted(sets))
    v1, v2 = crosscut_partition(fam, range(30))
    v2set = set(v2)
    crossing = sum(1 for s in fam.sets if sum(v in v2set for v in s) == 1)
    assert crossing >= 40 * 3 / 32


def test_subpair_inheritance_property():
    # exact-certified dense pairs: sub-pairs stay dense at eps/mu
    for seed in range(15):
        g = gen_gnp(20, 0.85, seed=seed)
        x, y = list(range(10)), list(range(10, 20))
        params = DensityParams(p=1.0, eps=0.15, d=0.4)
        if check_dense_exact(g, x, y, params).verdict != "dense":
            continue
        xs = x[:5]
        mu = 0.5
        sub = DensityParams(p=1.0, eps=params.eps / mu, d=0.4)
        assert check_dense_exact(g, xs, y, sub).verdict == "dense"


def test_stars_monotone_under_subgraphs():
    host = gen_gnp(40, 0.6, seed=3)
    sub = host.copy()
    rng = random.Random(5)
    edges = list(sub.edges())
    for u, v in rng.sample(edges, len(edges) // 3):
        sub.remove_edge(u, v)
    x = list(range(10))
    fam = SetFamily(2, [(10 + 2 * i, 11 + 2 * i) for i in range(6)])
    assert count_stars(sub, x, fam) <= count_stars(host, x, fam)
