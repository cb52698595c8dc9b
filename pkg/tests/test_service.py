import pytest
from fastapi.testclient import TestClient

from forestsolve.service import app

client = TestClient(app)

G3 = {
    "nodes": ["1", "2", "3"],
    "branches": [
        {"u": "1", "v": "2", "g": 1.0},
        {"u": "2", "v": "3", "g": 2.0},
        {"u": "1", "v": "3", "g": 3.0},
    ],
}
P3 = {
    "nodes": ["1", "2", "3"],
    "branches": [
        {"u": "1", "v": "2", "g": 1.0},
        {"u": "2", "v": "3", "g": 1.0},
    ],
}


class TestHealth:
    def test_ok(self):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json() == {"status": "ok"}


class TestSolve:
    def test_fixed(self):
        r = client.post("/solve", json={
            "network": G3, "fixed": {"1": 1.0, "2": 0.0},
        })
        assert r.status_code == 200
        body = r.json()
        assert body["voltages"]["3"] == pytest.approx(0.6)
        by_pair = {(e["u"], e["v"]): e["i"] for e in body["currents"]}
        assert ("1", "2") in by_pair or ("2", "1") in by_pair

    def test_inject(self):
        r = client.post("/solve", json={
            "network": G3, "inject": {"1": -1.0, "2": 1.0}, "ground": "1",
        })
        assert r.status_code == 200
        v = r.json()["voltages"]
        assert v["1"] == 0.0
        assert v["2"] == pytest.approx(5 / 11)
        assert v["3"] == pytest.approx(2 / 11)

    def test_needs_exactly_one_input(self):
        r = client.post("/solve", json={"network": G3})
        assert r.status_code == 422

    def test_disconnected_rejected(self):
        net = {"nodes": ["a", "b"], "branches": []}
        r = client.post("/solve", json={"network": net, "fixed": {"a": 1.0}})
        assert r.status_code == 422
        assert r.json()["error"] == "Disconnected"


class TestExact:
    def test_vv_with_check(self):
        r = client.post("/exact", json={
            "network": G3, "theorem": "vv",
            "fixed": {"1": 1.0, "2": 0.0}, "check": True,
        })
        assert r.status_code == 200
        body = r.json()
        assert body["voltages"]["3"] == pytest.approx(0.6)
        assert body["max_rel_err"] < 1e-9

    def test_vj(self):
        r = client.post("/exact", json={
            "network": G3, "theorem": "vj", "fixed": {"1": 1.0, "2": 0.0},
        })
        body = r.json()
        assert body["injected"]["1"] == pytest.approx(2.2)
        assert body["injected"]["2"] == pytest.approx(-2.2)

    def test_ji_with_check(self):
        r = client.post("/exact", json={
            "network": G3, "theorem": "ji",
            "inject": {"1": -1.0, "2": 1.0}, "check": True,
        })
        body = r.json()
        assert body["max_rel_err"] < 1e-9
        by_pair = {frozenset((e["u"], e["v"])): e["i"] for e in body["currents"]}
        assert abs(by_pair[frozenset(("1", "2"))]) == pytest.approx(5 / 11)

    def test_iv_with_check(self):
        r = client.post("/exact", json={
            "network": G3, "theorem": "iv",
            "inject": {"1": -1.0, "2": 1.0}, "ground": "1", "check": True,
        })
        body = r.json()
        assert body["voltages"]["2"] == pytest.approx(5 / 11)
        assert body["max_rel_err"] < 1e-9

    def test_missing_input_for_theorem(self):
        r = client.post("/exact", json={
            "network": G3, "theorem": "vv", "inject": {"1": 1.0, "2": -1.0},
        })
        assert r.status_code == 422

    def test_unbalanced_injection(self):
        r = client.post("/exact", json={
            "network": G3, "theorem": "ji", "inject": {"1": 1.0, "2": 1.0},
        })
        assert r.status_code == 422
        assert r.json()["error"] == "InvalidInjection"


class TestEstimate:
    def test_vv(self):
        r = client.post("/estimate", json={
            "network": G3, "theorem": "vv",
            "fixed": {"1": 1.0, "2": 0.0},
            "count": 20000, "seed": 1, "check": True,
        })
        body = r.json()
        est = body["voltages"]["3"]
        se = body["std_error"]["3"]
        assert abs(est - 0.6) <= 4 * se
        assert body["samples"] == 20000 and body["seed"] == 1

    def test_deterministic_for_seed(self):
        req = {
            "network": G3, "theorem": "ji",
            "inject": {"1": -1.0, "2": 1.0}, "count": 500, "seed": 9,
        }
        a = client.post("/estimate", json=req).json()
        b = client.post("/estimate", json=req).json()
        assert a == b

    def test_count_must_be_positive(self):
        r = client.post("/estimate", json={
            "network": G3, "theorem": "vv",
            "fixed": {"1": 1.0, "2": 0.0}, "count": 0,
        })
        assert r.status_code == 422


class TestEnumerateAndSample:
    def test_trees(self):
        r = client.post("/enumerate", json={"network": G3})
        body = r.json()
        assert body["weight_sum"] == pytest.approx(11.0)
        weights = sorted(o["weight"] for o in body["objects"])
        assert weights == pytest.approx([2.0, 3.0, 6.0])

    def test_forests(self):
        r = client.post("/enumerate", json={"network": G3, "roots": ["1", "2"]})
        body = r.json()
        assert body["weight_sum"] == pytest.approx(5.0)
        for o in body["objects"]:
            assert set(o["block_of"]) == {"1", "2", "3"}

    def test_cap(self):
        r = client.post("/enumerate", json={"network": G3, "cap": 1})
        assert r.status_code == 422
        assert r.json()["error"] == "TooLarge"
        assert "estimate" in r.json()["detail"]

    def test_sample_trees(self):
        req = {"network": G3, "count": 5, "seed": 0}
        a = client.post("/sample", json=req).json()
        b = client.post("/sample", json=req).json()
        assert a == b
        assert len(a["samples"]) == 5
        for s in a["samples"]:
            assert len(s["branches"]) == 2

    def test_sample_forests(self):
        r = client.post("/sample", json={
            "network": G3, "roots": ["1", "2"], "count": 4, "seed": 2,
        })
        for s in r.json()["samples"]:
            assert len(s["branches"]) == 1


class TestMarkov:
    def test_hitting(self):
        r = client.post("/markov/hitting", json={
            "network": P3, "start": "1", "roots": ["3"], "check": True,
        })
        body = r.json()
        assert body["tau"] == pytest.approx(4.0)
        assert body["max_rel_err"] < 1e-9

    def test_hitting_start_in_roots(self):
        r = client.post("/markov/hitting", json={
            "network": P3, "start": "3", "roots": ["3"],
        })
        assert r.status_code == 422
        assert r.json()["error"] == "StartInR"

    def test_absorb_exact(self):
        r = client.post("/markov/absorb", json={
            "network": G3, "start": "3", "roots": ["1", "2"], "check": True,
        })
        body = r.json()
        assert body["probabilities"]["1"] == pytest.approx(0.6)
        assert body["max_rel_err"] < 1e-9
        assert "std_error" not in body

    def test_absorb_estimate(self):
        r = client.post("/markov/absorb", json={
            "network": G3, "start": "3", "roots": ["1", "2"],
            "estimate": 20000, "seed": 3,
        })
        body = r.json()
        p1 = body["probabilities"]["1"]
        assert abs(p1 - 0.6) <= 4 * body["std_error"]["1"]
        assert body["samples"] == 20000

    def test_flow(self):
        net = {
            "nodes": ["1", "2"],
            "branches": [
                {"u": "1", "v": "2", "g": 0.25},
                {"u": "1", "v": "1", "g": 0.3},
                {"u": "2", "v": "2", "g": 0.2},
            ],
        }
        r = client.post("/markov/flow", json={
            "network": net, "p0": {"1": 1.0, "2": 0.0}, "check": True,
        })
        body = r.json()
        flows = {(e["u"], e["v"]): e["flow"] for e in body["flows"]}
        assert flows[("1", "2")] == pytest.approx(0.45)
        assert body["max_rel_err"] < 1e-9

    def test_flow_bad_distribution(self):
        r = client.post("/markov/flow", json={
            "network": P3, "p0": {"1": 0.7, "2": 0.7},
        })
        assert r.status_code == 422
        assert r.json()["error"] == "BadDistribution"
