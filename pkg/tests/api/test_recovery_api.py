import asyncio
import sys
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).resolve().parents[2]))
sys.path.append(str(Path(__file__).resolve().parents[1]))

import httpx  # noqa: E402

from core.config import settings  # noqa: E402
from main import app  # noqa: E402
from sbl_test_utils import block_instance  # noqa: E402


async def _request(method: str, url: str, **kwargs):
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://testserver") as client:
        return await client.request(method, url, **kwargs)


def _payload(kind: str = "log-tv", **extra) -> dict:
    rng = np.random.default_rng(60)
    A, _, Y = block_instance(rng, M=10, N=24, L=3, start=8, length=4, lam=0.01)
    payload = {
        "A": A.tolist(),
        "Y": Y.tolist(),
        "noise_variance": 0.01,
        "regularizer": {"kind": kind, "beta": 0.5, "epsilon": 0.01},
        "options": {"max_outer_iters": 10},
        "support_size": 4,
    }
    payload.update(extra)
    return payload


def test_health_and_root():
    res = asyncio.run(_request("GET", "/health"))
    assert res.status_code == 200
    assert res.json()["status"] == "healthy"

    res = asyncio.run(_request("GET", "/"))
    assert res.status_code == 200
    assert res.json()["health"] == "/health"


def test_solve_log_tv():
    res = asyncio.run(_request("POST", "/api/v1/recovery/solve", json=_payload()))
    assert res.status_code == 200, res.text
    body = res.json()
    assert body["algorithm"] == "log-tv(beta=0.5,eps=0.01)"
    assert len(body["gamma"]) == 24
    assert len(body["means"]) == 24 and len(body["means"][0]) == 3
    assert len(body["cost_trace"]) == body["outer_iters_used"] + 1
    assert body["support"] == [8, 9, 10, 11]
    assert all(g >= 0.0 for g in body["gamma"])


def test_solve_msbl_baseline():
    res = asyncio.run(_request("POST", "/api/v1/recovery/solve", json=_payload("msbl")))
    assert res.status_code == 200, res.text
    body = res.json()
    assert body["algorithm"] == "msbl"
    assert body["outer_iters_used"] <= 10


def test_solve_rejects_oversized_dictionary(monkeypatch):
    monkeypatch.setattr(settings, "api_max_dictionary_size", 100)
    res = asyncio.run(_request("POST", "/api/v1/recovery/solve", json=_payload()))
    assert res.status_code == 400
    body = res.json()
    assert body["status"] == "error"
    assert body["detail"]["limit"] == 100


def test_solve_dimension_mismatch_is_422():
    payload = _payload()
    payload["Y"] = payload["Y"][:-1]
    res = asyncio.run(_request("POST", "/api/v1/recovery/solve", json=payload))
    assert res.status_code == 422
    assert res.json()["status"] == "error"


def test_solve_request_validation():
    payload = _payload()
    payload["noise_variance"] = 0.0
    res = asyncio.run(_request("POST", "/api/v1/recovery/solve", json=payload))
    assert res.status_code == 422
    assert "detail" in res.json()


def test_demo_endpoint():
    body = {
        "sparsity_class": "homogeneous",
        "snr_db": 20,
        "seed": 3,
        "regularizer": {"kind": "msbl"},
        "N": 40,
        "M": 12,
        "L": 3,
    }
    res = asyncio.run(_request("POST", "/api/v1/recovery/demo", json=body))
    assert res.status_code == 200, res.text
    data = res.json()
    assert len(data["true_support"]) == 10
    assert len(data["estimated_support"]) == 10
    assert len(data["gamma"]) == 40
    assert 0.0 <= data["f1"] <= 1.0
    assert data["nmse"] >= 0.0
    assert sorted(length for _, length in data["blocks"]) == [5, 5]
