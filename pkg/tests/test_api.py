import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from main import app
from models.api import PairPayload
from models.physics import PhysicsParams, VortexPair
from services.radial_grid import make_grid

client = TestClient(app)


def _payload(n=200, kappa=0.5):
    grid = make_grid(10.0, n)
    r = grid.nodes
    pair = VortexPair.from_arrays(grid, 2.0 * np.exp(-0.5 * r), np.exp(-r), PhysicsParams(kappa=kappa, l=1, R=10.0))
    return PairPayload.from_pair(pair).model_dump()


def test_health():
    response = client.get("/health", params={"echo": "ping"})
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == 200
    assert body["service"] == "vortexforge"
    assert body["echo"] == "ping" and body["path_echo"] is None


def test_health_with_path():
    body = client.get("/health/solver").json()
    assert body["path_echo"] == "solver"


def test_root():
    assert "vortexforge" in client.get("/").json()["message"]


def test_quadcheck_endpoint():
    response = client.post("/grid/quadcheck", json={"R": 2.0, "n": 2047, "tolerance": 1e-3})
    assert response.status_code == 200
    body = response.json()
    assert body["passed"] is True
    assert len(body["rows"]) == 4


def test_functionals_endpoint():
    response = client.post("/functionals", json=_payload())
    assert response.status_code == 200
    body = response.json()
    assert body["total_flux"] == pytest.approx(body["Q1"] + 2 * body["Q2"])


def test_verify_endpoint():
    response = client.post("/verify", json={"pair": _payload()})
    assert response.status_code == 200
    assert response.json()["all_pass"] is True


def test_mismatched_pair_is_unprocessable():
    payload = _payload()
    payload["a2"] = payload["a2"][:-1]
    response = client.post("/functionals", json=payload)
    assert response.status_code == 422


def test_minimize_endpoint_rejects_flux_window():
    request = {"l": 1, "R": 10.0, "n": 64, "targets": {"q1": 2 * math.pi, "q2": 1.0}}
    response = client.post("/solve/minimize", json=request)
    assert response.status_code == 422
    assert "2*pi" in response.json()["detail"]


def test_minimize_endpoint_short_run():
    request = {
        "l": 1,
        "R": 10.0,
        "n": 64,
        "targets": {"q1": math.pi, "q2": 2 * math.pi},
        "options": {"max_iters": 20},
    }
    response = client.post("/solve/minimize", json=request)
    assert response.status_code == 200
    body = response.json()
    assert body["report"]["method"] == "minimize"
    assert len(body["pair"]["a1"]) == 64
    assert body["report"]["q1"] == pytest.approx(math.pi, rel=1e-12)


def test_mpass_endpoint_requires_hypothesis():
    request = {"params": {"kappa": 0.0, "beta": 0.0, "l": 1, "R": 10.0}, "n": 64}
    assert client.post("/solve/mpass", json=request).status_code == 422


def test_refine_endpoint():
    grid = make_grid(10.0, 64)
    small = (1e-3 * np.sin(math.pi * grid.nodes / 10.0)).tolist()
    request = {"pair": {"params": {"kappa": 1.0, "beta": 0.0, "l": 1, "R": 10.0}, "a1": small, "a2": small}}
    response = client.post("/solve/refine", json=request)
    assert response.status_code == 200
    assert response.json()["report"]["trivial"] is True
