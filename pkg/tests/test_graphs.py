import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinembed.graphs import (
    AdversarySpec,
    Graph,
    GuestSpec,
    adversary_delete,
    bandwidth_of_labeling,
    gen_gnp,
    gen_guest,
    read_edgelist,
    read_labeling,
    verify_min_degree_ratio,
    write_edgelist,
    write_labeling,
)


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def test_gnp_zero_probability_is_empty():
    g = gen_gnp(5, 0.0, seed=1)
    assert g.m == 0


def test_gnp_certain_edges_is_complete():
    g = gen_gnp(5, 1.0, seed=1)
    assert g.m == 10


def test_gnp_edge_count_within_six_sigma():
    n, p = 1000, 0.1
    pairs = n * (n - 1) // 2
    mean = p * pairs
    sigma = math.sqrt(pairs * p * (1 - p))
    g = gen_gnp(n, p, seed=7)
    assert abs(g.m - mean) <= 6 * sigma


def test_gnp_deterministic_and_symmetric():
    a = gen_gnp(80, 0.3, seed=5)
    b = gen_gnp(80, 0.3, seed=5)
    assert a == b
    for u, v in a.edges():
        assert a.has_edge(v, u)
    assert a.m == sum(a.degree(v) for v in range(a.n)) // 2


def test_adversary_no_budget_leaves_graph_unchanged():
    k4 = complete_graph(4)
    out = adversary_delete(k4, AdversarySpec(gamma=0.5, seed=0))
    assert out == k4  # ceil(1.0 * 3) = 3 forces no deletion


def test_adversary_on_empty_graph():
    g = Graph(6)
    out = adversary_delete(g, AdversarySpec(gamma=0.1, seed=0))
    assert out.m == 0


@pytest.mark.parametrize("strategy", AdversarySpec.STRATEGIES)
def test_adversary_respects_degree_budget(strategy):
    host = gen_gnp(200, 0.3, seed=1)
    out = adversary_delete(host, AdversarySpec(gamma=0.1, strategy=strategy, seed=2))
    assert verify_min_degree_ratio(host, out, 0.1)
    for v in range(host.n):
        assert out.degree(v) >= math.ceil(0.6 * host.degree(v))


def test_adversary_actually_deletes():
    host = gen_gnp(200, 0.3, seed=1)
    out = adversary_delete(host, AdversarySpec(gamma=0.1, seed=2))
    assert out.m < host.m


def test_min_degree_ratio_reflexive():
    g = gen_gnp(30, 0.4, seed=3)
    assert verify_min_degree_ratio(g, g, 0.5)


def test_min_degree_ratio_path_in_triangle():
    k3 = complete_graph(3)
    path = Graph(3, [(0, 1), (1, 2)])
    assert not verify_min_degree_ratio(k3, path, 0.1)  # endpoints: 1 < 0.6*2


def test_min_degree_ratio_k5_minus_edge():
    k5 = complete_graph(5)
    sub = k5.copy()
    sub.remove_edge(0, 1)
    assert verify_min_degree_ratio(k5, sub, 0.2)  # 3 >= 0.7*4 = 2.8


def test_min_degree_ratio_rejects_foreign_edge():
    host = Graph(3, [(0, 1)])
    sub = Graph(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        verify_min_degree_ratio(host, sub, 0.1)


def test_guest_path_union_small_is_a_path():
    g, order = gen_guest(GuestSpec(m=10, delta=2, kind="path-union"))
    assert g.m == 9
    assert order == list(range(10))
    assert bandwidth_of_labeling(g, order) == 1


def test_guest_cycle_union_bandwidth():
    g, order = gen_guest(GuestSpec(m=12, delta=2, kind="cycle-union", seed=4))
    assert bandwidth_of_labeling(g, order) <= 3
    assert all(g.degree(v) == 2 for v in range(12))


def test_guest_cycle_union_rejects_odd():
    with pytest.raises(ValueError):
        gen_guest(GuestSpec(m=13, delta=2, kind="cycle-union"))


def test_guest_random_banded_bandwidth_scan():
    spec = GuestSpec(m=500, delta=3, beta=0.02, kind="random-bandwidth-bipartite", seed=3)
    g, order = gen_guest(spec)
    assert bandwidth_of_labeling(g, order) <= 10
    assert g.max_degree() <= 3
    assert g.two_coloring() is not None


def test_guest_grid_strip():
    g, order = gen_guest(GuestSpec(m=20, delta=3, kind="grid-strip"))
    assert bandwidth_of_labeling(g, order) == 2
    with pytest.raises(ValueError):
        gen_guest(GuestSpec(m=20, delta=2, kind="grid-strip"))


@settings(max_examples=40, deadline=None)
@given(st.integers(10, 400), st.sampled_from(["path-union", "cycle-union", "random-bandwidth-bipartite"]), st.integers(0, 50))
def test_guest_always_bipartite_with_declared_limits(m, kind, seed):
    if kind == "cycle-union":
        m += m % 2
        m = max(m, 4)
    spec = GuestSpec(m=m, delta=3, beta=0.05, kind=kind, seed=seed)
    g, order = gen_guest(spec)
    assert g.two_coloring() is not None
    assert g.max_degree() <= spec.delta


def test_bandwidth_examples():
    p3 = Graph(3, [(0, 1), (1, 2)])
    assert bandwidth_of_labeling(p3, [0, 1, 2]) == 1
    assert bandwidth_of_labeling(Graph(4), [0, 1, 2, 3]) == 0
    c4 = Graph(4, [(0, 1), (1, 3), (3, 2), (2, 0)])
    assert bandwidth_of_labeling(c4, [0, 1, 2, 3]) == 2


def test_bandwidth_rejects_non_permutation():
    with pytest.raises(ValueError):
        bandwidth_of_labeling(Graph(3), [0, 1, 1])


def test_edgelist_roundtrip():
    g = gen_gnp(40, 0.2, seed=9)
    text = write_edgelist(g)
    first = text.splitlines()[0]
    assert first == f"{g.n} {g.m}"
    assert read_edgelist(text) == g


def test_labeling_roundtrip():
    order = [3, 1, 0, 2]
    assert read_labeling(write_labeling(order)) == order
