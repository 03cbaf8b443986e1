import math

import pytest
from fastapi.testclient import TestClient

from pspin_hessian.service import app


@pytest.fixture
def client(out_dir):
    return TestClient(app)


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_experiments_listing(client):
    names = client.get("/experiments").json()["experiments"]
    for name in ("predict", "classify", "complexity-curve", "simulate", "kacrice", "goe-check"):
        assert name in names


def test_predict_endpoint(client):
    body = client.post("/predict", json={"spec": "3"}).json()
    assert body["e0"] == pytest.approx(1.656998363527473, abs=1e-12)
    assert body["lambda_min"] == pytest.approx(body["center"] - body["radius"])
    mixed = client.post("/predict", json={"spec": {"gamma3": 0.5, "gamma4": 0.5}}).json()
    assert mixed["y0"] > 6


def test_classify_endpoint(client):
    body = client.post("/classify", json={"spec": "2:0.95,4:0.05"}).json()
    assert body["klass"] == "Full" and body["g_value"] < 0


def test_bad_spec_is_400(client):
    assert client.post("/predict", json={"spec": "1:1"}).status_code == 400


def test_curve_endpoint(client):
    body = client.post("/complexity-curve", json={"spec": "3", "grid": {"points": 11}}).json()
    assert body["header"] == ["y", "R"]
    assert len(body["rows"]) == 12


def test_run_endpoint(client):
    resp = client.post("/run", json={"experiment": "goe-check", "n": 300, "draws": 2, "seed": 1})
    assert resp.status_code == 200
    assert set(resp.json()["verdicts"]) == {"w1", "lambda_min"}


def test_run_infinite_window_roundtrip(client):
    resp = client.post("/run", json={"experiment": "kacrice", "spec": "3", "n_list": [20],
                                     "samples": 200, "seed": 2,
                                     "energy_window": ["-Infinity", -1.6]})
    assert resp.status_code == 200
    assert resp.json()["config"]["energy_window"][0] in ("-Infinity", -math.inf)


def test_run_config_invalid(client):
    resp = client.post("/run", json={"experiment": "simulate", "spec": "3"})
    assert resp.status_code == 422
    assert "n" in resp.json()["detail"]
