import json

import pytest
from fastapi.testclient import TestClient

from lingequiv import digraph as dg
from lingequiv.equivalence import can_add_edge, presentation, traverse_class
from lingequiv.cli import class_payload
from lingequiv.reduction import reduce
from lingequiv.service import create_app

from conftest import redundant_tail_example, five_vertex, four_vertex


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def post(client, path, **body):
    resp = client.post(path, json=body)
    assert resp.status_code == 200
    return resp.json()


def test_reduce_endpoint_matches_library(client):
    g = redundant_tail_example()
    got = post(client, "/reduce", graph=dg.to_json_dict(g))
    assert got["ok"]
    want = reduce(g).reduced
    assert got["payload"]["graph"] == dg.to_json_dict(want)
    assert got["payload"]["was_irreducible"] is False


def test_reduce_identity_payload(client):
    g = five_vertex("G1")
    got = post(client, "/reduce", graph=dg.to_json_dict(g))
    assert got["payload"]["graph"] == dg.to_json_dict(g)
    assert got["payload"]["was_irreducible"] is True


def test_irreducible_and_rank(client):
    g = five_vertex("G1")
    got = post(client, "/irreducible", graph=dg.to_json_dict(g))
    assert got["payload"] == {"irreducible": True}
    got = post(client, "/rank", graph=dg.to_json_dict(g),
               params={"kind": "edge", "z": ["L1", "L2", "X1"],
                       "y": ["L1", "L2", "X2"]})
    assert got["payload"]["value"] == 2


def test_edge_admissible_example(client):
    g = five_vertex("G1")
    got = post(client, "/edge/admissible", graph=dg.to_json_dict(g))
    absent = {(e["tail"], e["head"]): e["addable"] for e in got["payload"]["absent"]}
    assert absent[("X2", "L2")] is True
    assert absent[("X2", "L1")] is False
    for e in got["payload"]["present"]:
        tail, head = g.index_of(e["tail"]), g.index_of(e["head"])
        assert e["deletable"] == can_add_edge(g.remove_edge(tail, head), tail, head)


def test_equiv_class_pagination_and_library_equality(client):
    g = five_vertex("G1")
    got = post(client, "/equiv/class", graph=dg.to_json_dict(g),
               params={"limit": 10})
    payload = got["payload"]
    assert payload["total"] == 6
    assert len(payload["members"]) == 6
    want = class_payload(traverse_class(g))
    assert payload["members"] == want["members"]
    assert payload["transitions"] == want["transitions"]
    # second page is empty but the totals stay identical
    page2 = post(client, "/equiv/class", graph=dg.to_json_dict(g),
                 params={"limit": 10, "offset": 10})
    assert page2["payload"]["total"] == 6
    assert page2["payload"]["members"] == []
    assert any(d.startswith("members_found=") for d in page2["diagnostics"])


def test_present_endpoint(client):
    g = four_vertex("G3")
    got = post(client, "/present", graph=dg.to_json_dict(g))
    p = presentation(g)
    assert got["payload"]["solid"] == sorted(
        [g.labels[a], g.labels[b]] for a, b in p.solid_edges)
    assert got["payload"]["dashed"] == sorted(
        [g.labels[a], g.labels[b]] for a, b in p.dashed_edges)


def test_recover_endpoint_with_graph_oracle(client):
    g = four_vertex("G1")
    got = post(client, "/recover", graph=dg.to_json_dict(g),
               params={"traverse": True})
    assert got["ok"]
    assert got["payload"]["class"]["total"] == 10


def test_revision_token_echoed(client):
    g = five_vertex("G1")
    got = post(client, "/irreducible", graph=dg.to_json_dict(g),
               params={"revision": "rev-42"})
    assert got["revision"] == "rev-42"
    got = post(client, "/rank", graph=dg.to_json_dict(g),
               params={"kind": "duality", "z": [], "y": [], "revision": 7})
    assert got["revision"] == 7


def test_error_payloads_do_not_kill_the_process(client):
    got = post(client, "/reduce",
               graph={"vertices": ["a"], "latent": [], "edges": [["a", "zzz"]]})
    assert got["ok"] is False and "zzz" in got["error"]
    got = post(client, "/rank", graph=dg.to_json_dict(five_vertex("G1")),
               params={"kind": "bogus", "z": [], "y": []})
    assert got["ok"] is False
    # still serving afterwards
    got = post(client, "/irreducible", graph=dg.to_json_dict(five_vertex("G1")))
    assert got["ok"]


def test_statelessness_replay_any_order(client):
    g = five_vertex("G1")
    requests = [
        ("/irreducible", {"graph": dg.to_json_dict(g)}),
        ("/rank", {"graph": dg.to_json_dict(g),
                   "params": {"kind": "path", "z": ["X1", "X2"], "y": ["L1"]}}),
        ("/equiv/class", {"graph": dg.to_json_dict(g), "params": {"limit": 3}}),
        ("/present", {"graph": dg.to_json_dict(g)}),
    ]
    first = [post(client, path, **body) for path, body in requests]
    second = [post(client, path, **body) for path, body in reversed(requests)]
    for a, b in zip(first, reversed(second)):
        assert a == b
