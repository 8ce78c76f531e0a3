"""HTTP endpoints, checked against the in-process engine."""

import pytest
from starlette.testclient import TestClient

from negotree import GenConfig, __version__, negotiate
from negotree.harness import batch
from negotree.netio import net_from_doc, net_to_doc, outcome_record
from negotree.service.app import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def demo_docs(demo_nets):
    return [net_to_doc(n) for n in demo_nets]


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": __version__}


class TestNegotiate:
    def test_matches_engine(self, client, demo_docs, demo_nets, demo_space):
        r = client.post(
            "/negotiate", json={"net1": demo_docs[0], "net2": demo_docs[1], "seed": 0}
        )
        assert r.status_code == 200
        body = r.json()
        direct = negotiate(demo_nets, seed=0)
        assert body["chosen"] == outcome_record(direct.chosen, demo_space)
        assert body["final_set"] == [
            outcome_record(o, demo_space) for o in direct.final_set
        ]
        assert body["initial_agreements"] == [
            outcome_record(o, demo_space)
            for o in direct.phase1.initial_agreements
        ]
        st = body["stats"]
        assert st["s_attr"] == 3 and st["s_os"] == 8
        assert tuple(st["s_out"]) == direct.stats.s_out
        assert tuple(st["s_dq"]) == direct.stats.s_dq
        assert st["s_iter"] == direct.stats.s_iter
        assert len(body["trace"]) == len(direct.trace)
        assert body["trace"][-1]["event"] == "final"
        assert body["trace"][-1]["outcome"] == body["chosen"]

    def test_invalid_net_is_422_with_violations(self, client, demo_docs):
        bad = demo_docs[0].copy()
        bad["edges"] = bad["edges"] + [["B", "C"]]  # closes a cycle
        r = client.post(
            "/negotiate", json={"net1": bad, "net2": demo_docs[1], "seed": 0}
        )
        assert r.status_code == 422
        detail = r.json()["detail"]
        assert isinstance(detail, list)
        assert any("cycle" in v for v in detail)

    def test_oracle_bound_too_small_is_422(self, client, demo_docs):
        r = client.post(
            "/negotiate",
            json={
                "net1": demo_docs[0], "net2": demo_docs[1],
                "seed": 0, "oracle_bound": 4,
            },
        )
        assert r.status_code == 422
        assert "exact-mode" in r.json()["detail"]

    def test_improvement_bound_passthrough(self, client, demo_docs, demo_nets):
        r = client.post(
            "/negotiate",
            json={
                "net1": demo_docs[0], "net2": demo_docs[1],
                "seed": 0, "improvement_bound": 0,
            },
        )
        assert r.status_code == 200
        direct = negotiate(demo_nets, seed=0, improvement_bound=0)
        space = demo_nets[0].space
        assert r.json()["chosen"] == outcome_record(direct.chosen, space)

    def test_malformed_body_is_422(self, client, demo_docs):
        r = client.post("/negotiate", json={"net1": demo_docs[0], "seed": 0})
        assert r.status_code == 422


class TestBatch:
    def test_matches_engine(self, client):
        req = {"config": {"attrs": 4}, "rounds": 5, "seed": 9}
        r = client.post("/batch", json=req)
        assert r.status_code == 200
        body = r.json()
        direct = batch(GenConfig(attrs=4, seed=0), rounds=5, seed=9)
        assert body["rounds"] == 5
        row = body["row"]
        assert row["s_attr"] == 4
        assert row["s_os"] == direct.mean_s_os
        assert row["s_out"] == pytest.approx(direct.mean_s_out)
        assert row["s_dq"] == pytest.approx(direct.mean_s_dq)
        assert row["s_iter"] == pytest.approx(direct.mean_s_iter)
        assert body["csv"].splitlines()[0] == "s_attr,s_os,s_out,s_dq,s_iter,s_time_sec"

    def test_bad_config_is_422(self, client):
        r = client.post(
            "/batch", json={"config": {"attrs": 0}, "rounds": 1, "seed": 0}
        )
        assert r.status_code == 422
        assert "attrs" in r.json()["detail"]

    def test_oversized_round_is_422(self, client):
        r = client.post(
            "/batch",
            json={"config": {"attrs": 5}, "rounds": 1, "seed": 0, "oracle_bound": 16},
        )
        assert r.status_code == 422


class TestGenerate:
    def test_returns_valid_deterministic_nets(self, client):
        req = {"config": {"attrs": 4, "domain_max": 3}, "count": 3, "seed": 8}
        r = client.post("/generate", json=req)
        assert r.status_code == 200
        nets = r.json()["nets"]
        assert len(nets) == 3
        for doc in nets:
            assert net_from_doc(doc).validate() == []
        again = client.post("/generate", json=req)
        assert again.json() == r.json()

    def test_bad_config_is_422(self, client):
        r = client.post(
            "/generate", json={"config": {"attrs": 3, "domain_max": 9}, "seed": 0}
        )
        assert r.status_code == 422


class TestVerify:
    def test_clean_report(self, client):
        r = client.post(
            "/verify", json={"config": {"attrs": 5}, "rounds": 5, "seed": 0}
        )
        assert r.status_code == 200
        body = r.json()
        assert body == {
            "rounds": 5,
            "po_passes": 5,
            "wpo_passes": 5,
            "ok": True,
            "counterexamples": [],
        }

    def test_oversized_space_is_422(self, client):
        r = client.post(
            "/verify",
            json={"config": {"attrs": 5}, "rounds": 1, "seed": 0, "oracle_bound": 16},
        )
        assert r.status_code == 422
        assert "oracle bound" in r.json()["detail"]


class TestValidate:
    def test_valid_net(self, client, demo_docs):
        r = client.post("/validate", json={"net": demo_docs[0]})
        assert r.status_code == 200
        assert r.json() == {"ok": True, "violations": []}

    def test_semantic_violations_reported(self, client, demo_docs):
        doc = demo_docs[0].copy()
        doc["edges"] = doc["edges"] + [["B", "C"]]
        r = client.post("/validate", json={"net": doc})
        assert r.status_code == 200
        body = r.json()
        assert body["ok"] is False
        assert any("cycle" in v for v in body["violations"])

    def test_format_problems_reported_not_raised(self, client, demo_docs):
        doc = demo_docs[0].copy()
        doc["attributes"] = [{"name": "A", "values": ["a"]}] + doc["attributes"][1:]
        r = client.post("/validate", json={"net": doc})
        assert r.status_code == 200
        body = r.json()
        assert body["ok"] is False
        assert body["violations"]
