import pytest
from fastapi.testclient import TestClient

from fstsp.service.app import app

client = TestClient(app)


@pytest.fixture(scope="module")
def instance_payload():
    resp = client.post("/generate", json={"seed": 1, "c": 3, "depot": "a",
                                          "endurance": 20, "speed": 25, "ratio": 1.0})
    assert resp.status_code == 200
    return resp.json()


def test_health():
    resp = client.get("/health")
    assert resp.status_code == 200 and resp.json() == {"status": "ok"}


def test_generate_shape(instance_payload):
    data = instance_payload
    assert data["c"] == 3
    assert len(data["truck_time"]) == 5
    assert data["truck_time"][0][4] == 0.0
    assert data["meta"]["rng"] == "splitmix64"


def test_generate_validation_error():
    resp = client.post("/generate", json={"seed": 1, "c": 3, "ratio": 0.0})
    assert resp.status_code == 422
    resp = client.post("/generate", json={"seed": 1, "c": -2})
    assert resp.status_code == 422  # pydantic bound


def test_solve_and_check_pipeline(instance_payload):
    resp = client.post("/solve", json={"instance": instance_payload,
                                       "variant": "dmn2", "mode": "wait"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["status"] == "Optimal"
    assert body["schedule"]["route"][0] == 0

    oracle = client.post("/oracle", json={"instance": instance_payload, "mode": "wait"})
    assert oracle.status_code == 200
    assert oracle.json()["value"] == pytest.approx(body["value"], rel=1e-6)

    check = client.post("/check", json={"instance": instance_payload,
                                        "schedule": body["schedule"], "mode": "wait"})
    assert check.status_code == 200
    assert check.json()["feasible"] is True
    assert check.json()["completion"] == pytest.approx(body["value"], rel=1e-9)


def test_check_rejects_bad_schedule(instance_payload):
    resp = client.post("/check", json={"instance": instance_payload,
                                       "schedule": {"route": [0, 1, 4], "sorties": []},
                                       "mode": "wait"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["feasible"] is False and "COVERAGE" in body["error"]


def test_heuristic_endpoint(instance_payload):
    resp = client.post("/heuristic", json={"instance": instance_payload, "mode": "nowait"})
    assert resp.status_code == 200
    sched = resp.json()
    check = client.post("/check", json={"instance": instance_payload,
                                        "schedule": sched, "mode": "nowait"})
    assert check.json()["feasible"] is True


def test_lp_endpoint(instance_payload):
    resp = client.post("/lp", json={"instance": instance_payload,
                                    "variant": "mcbar", "mode": "nowait"})
    assert resp.status_code == 200
    text = resp.json()["content"]
    assert text.startswith("\\ flying-sidekick") and "Binaries" in text


def test_plot_endpoint(instance_payload):
    sched = client.post("/heuristic", json={"instance": instance_payload,
                                            "mode": "wait"}).json()
    resp = client.post("/plot", json={"instance": instance_payload, "schedule": sched})
    assert resp.status_code == 200
    svg = resp.json()["content"]
    assert svg.startswith("<svg") and 'class="depot"' in svg


def test_unknown_variant_is_422(instance_payload):
    resp = client.post("/solve", json={"instance": instance_payload,
                                       "variant": "nope", "mode": "wait"})
    assert resp.status_code == 422


def test_malformed_instance_is_422():
    resp = client.post("/solve", json={"instance": {"c": 2}, "variant": "dmn2",
                                       "mode": "wait"})
    assert resp.status_code == 422
