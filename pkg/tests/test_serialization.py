import json

from spinembed.density import DensityParams, SetFamily, check_dense_exact
from spinembed.embed import PlantedSizes, gen_planted_spin_host, read_embedding, write_embedding
from spinembed.graphs import Graph
from spinembed.hpartition import partition_H
from spinembed.rainbow import EdgeColoring, gen_k_bounded
from spinembed.reporting import canonical_json, fmt_cell


def test_dense_verdict_json_fields():
    g = Graph(8)
    v = check_dense_exact(g, range(4), range(4, 8), DensityParams(p=1.0, eps=0.1, d=0.5))
    payload = v.to_json()
    assert set(payload) == {"verdict", "witness", "samples", "confidence", "note"}
    json.dumps(payload)


def test_set_family_serializes_sorted_lists():
    fam = SetFamily(2, [(5, 1), (3, 2)])
    payload = fam.to_json()
    assert payload == {"ell": 2, "sets": [[1, 5], [2, 3]]}


def test_hpartition_to_json_role_lists():
    g = Graph(100, [(i, i + 1) for i in range(99)])
    part = partition_H(g, list(range(100)), r=2, eta=0.4, delta=2)
    payload = part.to_json()
    assert payload["t"] == 243
    assert sum(len(v) for v in payload["classes"].values()) == 100
    json.dumps(payload)


def test_gpartition_to_json():
    _, truth = gen_planted_spin_host(1, 2, PlantedSizes(big=10, connecting=4, balancing=4), d=0.5, p=0.5, seed=0)
    payload = truth.to_json()
    assert "clusters" in payload and "params" in payload
    assert payload["clusters"]["u 1 0"] == sorted(truth.cluster("u", 1))
    json.dumps(payload)


def test_embedding_pair_lines_roundtrip():
    e = {0: 10, 2: 7, 1: 3}
    text = write_embedding(e)
    assert text.splitlines()[0] == "0 10"
    assert read_embedding(text) == e


def test_coloring_lines_roundtrip():
    phi = gen_k_bounded(8, 3, seed=1)
    back = EdgeColoring.from_lines(phi.to_lines(), 8, 3)
    assert (back.colors == phi.colors).all()


def test_canonical_json_is_key_sorted_and_float_stable():
    a = canonical_json({"b": 0.1 + 0.2, "a": [1.0000000000004, {"z": 1}]})
    assert a == '{"a":[1.0,{"z":1}],"b":0.3}'
    assert fmt_cell(1 / 3) == "0.3333333333"
    assert fmt_cell(None) == ""
