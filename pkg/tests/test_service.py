import pytest
from fastapi.testclient import TestClient

from eulersim.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def synth_payload(**overrides):
    payload = {
        "model": "heisenberg2",
        "target": "dipolar",
        "group": "g1",
        "mode": "eulerian",
        "tsim": 0.0333,
    }
    payload.update(overrides)
    return payload


class TestSynthEndpoint:
    def test_dipolar(self, client):
        resp = client.post("/synth", json=synth_payload())
        assert resp.status_code == 200
        body = resp.json()
        assert body["feasible"] is True
        assert body["total_weight"] == pytest.approx(2.0, abs=1e-8)
        assert body["group_order"] == 4
        assert body["segment_count"] == 8
        assert body["mixture_residual"] < 1e-9
        doc = body["schedule"]
        assert doc["format_version"] == 1
        assert len(doc["segments"]) == 16
        assert doc["hamiltonian"]["n_qubits"] == 2

    def test_open_system_dephasing(self, client):
        resp = client.post(
            "/synth",
            json=synth_payload(group="g_dephasing", decouple=["x"]),
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["total_weight"] == pytest.approx(2.0, abs=1e-8)
        nz = {k: v for k, v in body["weights"].items() if v > 1e-9}
        assert set(nz) == {"I", "Z0", "Z1", "Z0Z1"}

    def test_infeasible_target_409(self, client):
        target = {"n_qubits": 2, "terms": [{"coeff": 1.0, "word": {"0": "X"}}]}
        resp = client.post("/synth", json=synth_payload(target=target))
        assert resp.status_code == 409
        assert resp.json()["kind"] == "infeasible"
        assert resp.json()["residual"] > 0

    def test_unknown_group_422(self, client):
        resp = client.post("/synth", json=synth_payload(group="nope"))
        assert resp.status_code == 422

    def test_model_group_size_mismatch_422(self, client):
        resp = client.post("/synth", json=synth_payload(model="heisenberg4"))
        assert resp.status_code == 422


class TestVerifyEndpoint:
    def test_round_trip_passes(self, client):
        doc = client.post("/synth", json=synth_payload()).json()["schedule"]
        resp = client.post("/verify", json={"schedule": doc})
        assert resp.status_code == 200
        body = resp.json()
        assert body["passed"] is True
        assert body["residual_norm"] < 1e-8
        assert body["decoupling_residuals"]["system"] < 1e-10

    def test_corrupted_coast_fails(self, client):
        doc = client.post("/synth", json=synth_payload()).json()["schedule"]
        # stretch the first weighted coast (segment 5, a Z-vertex coast) by
        # shifting every later segment; weights no longer match the target
        assert doc["segments"][5]["kind"] == "coast"
        shift = 0.25 * doc["sim_interval"]
        for seg in doc["segments"][6:]:
            seg["start"] += shift
        doc["cycle_time"] += shift
        resp = client.post("/verify", json={"schedule": doc})
        assert resp.status_code == 200
        body = resp.json()
        assert body["passed"] is False
        assert body["residual_norm"] > 100 * body["tolerance"]


class TestSimulateEndpoint:
    def test_small_infidelity(self, client):
        doc = client.post("/synth", json=synth_payload()).json()["schedule"]
        resp = client.post("/simulate", json={"schedule": doc, "cycles": 2})
        assert resp.status_code == 200
        body = resp.json()
        assert body["cycles"] == 2
        assert body["infidelity"] < 1e-5
        assert len(body["per_cycle_error"]) == 2
        assert body["unitarity_defect"] < 1e-9


class TestSweepEndpoint:
    def test_cycle_sweep_slope_two(self, client):
        resp = client.post(
            "/sweep",
            json={
                "base": synth_payload(),
                "param": "cycle",
                "minimum": 0.01,
                "maximum": 0.1,
                "points": 6,
            },
        )
        assert resp.status_code == 200
        body = resp.json()
        assert body["slope"] == pytest.approx(2.0, abs=0.3)
        assert len(body["rows"]) == 6
        assert body["csv"].startswith("cycle,cycle_time,error")

    def test_bad_range_422(self, client):
        resp = client.post(
            "/sweep",
            json={"base": synth_payload(), "param": "cycle",
                  "minimum": 0.1, "maximum": 0.01},
        )
        assert resp.status_code == 422


class TestTabulatedShape:
    def test_synth_with_samples(self, client):
        samples = [[0.0, 0.0], [0.25, 1.0], [0.5, 1.4], [0.75, 1.0], [1.0, 0.0]]
        resp = client.post(
            "/synth",
            json=synth_payload(shape="tabulated", shape_samples=samples),
        )
        assert resp.status_code == 200
        doc = resp.json()["schedule"]
        assert doc["shape"]["kind"] == "tabulated"
        verify = client.post("/verify", json={"schedule": doc})
        assert verify.json()["passed"] is True

    def test_missing_samples_422(self, client):
        resp = client.post("/synth", json=synth_payload(shape="tabulated"))
        assert resp.status_code == 422


class TestMeta:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}

    def test_presets(self, client):
        body = client.get("/presets").json()
        assert "g1" in body["groups"]
        assert "honeycomb" in body["groups"]
        assert "dipolar" in body["targets"]
        assert body["modes"] == ["bb", "eulerian", "symmetric"]
        lattice = body["honeycomb_plaquette"]
        assert len(lattice["vertices"]) == 6
        assert len(lattice["edges"]) == 6

    def test_group_export(self, client):
        body = client.get("/groups/g1").json()
        assert body["order"] == 4
        assert body["generator_labels"] == ["x0", "z0"]
        assert len(body["euler_cycle"]) == 8
        assert sorted(set(body["euler_cycle"])) == ["x0", "z0"]

    def test_group_export_unknown_422(self, client):
        assert client.get("/groups/nope").status_code == 422
