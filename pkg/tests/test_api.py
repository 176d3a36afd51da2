"""
Tests for the HTTP API endpoints.
"""

import pytest
from httpx import AsyncClient


# ============== Health Tests ==============


async def test_health(client: AsyncClient):
    response = await client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}


# ============== Spectrum Tests ==============


async def test_spectrum(client: AsyncClient):
    response = await client.get("/api/v1/spectrum", params={"q": 2, "b": 0.5, "rmin": -3, "rmax": 3})
    assert response.status_code == 200
    data = response.json()
    assert data["command"] == "spectrum"
    assert len(data["points"]) == 7
    point = next(p for p in data["points"] if p["r"] == 0)
    assert point["x"] == pytest.approx(1.5, rel=1e-15)


async def test_spectrum_b_out_of_range(client: AsyncClient):
    response = await client.get("/api/v1/spectrum", params={"q": 2, "b": 0.3})
    assert response.status_code == 422
    data = response.json()
    assert data["code"] == "VALIDATION_INVALID_PARAMETER"
    assert data["field"] == "b"


async def test_spectrum_missing_q(client: AsyncClient):
    response = await client.get("/api/v1/spectrum", params={"b": 0.5})
    assert response.status_code == 422
    data = response.json()
    assert data["code"] == "VALIDATION_ERROR"
    assert any("q" in error["loc"] for error in data["detail"])
    assert "X-Request-ID" in response.headers


async def test_locate(client: AsyncClient):
    response = await client.get("/api/v1/locate", params={"q": 2, "x0": 1.5})
    assert response.status_code == 200
    data = response.json()
    assert data["b"] == pytest.approx(0.5, abs=1e-12)
    assert data["r"] == 0


# ============== Oscillator Tests ==============


async def test_hamiltonian(client: AsyncClient):
    response = await client.get("/api/v1/hamiltonian", params={"q": 2, "n_max": 2})
    assert response.status_code == 200
    energies = [level["energy"] for level in response.json()["levels"]]
    assert energies == pytest.approx([0.5, 2.0, 5.0])


async def test_polys_momentum(client: AsyncClient):
    response = await client.get("/api/v1/polys", params={"q": 2, "x": 0.9, "n_max": 1, "kind": "momentum"})
    assert response.status_code == 200
    first = response.json()["values"][1]
    assert first["value"] == pytest.approx(0.0, abs=1e-15)
    assert first["imag"] == pytest.approx(0.9)


async def test_eigenfunction(client: AsyncClient):
    response = await client.get("/api/v1/eigenfunction", params=[("q", 2), ("x", 0.5), ("y", 0.0), ("y", 0.3)])
    assert response.status_code == 200
    points = response.json()["points"]
    assert points[0]["product_re"] == 1.0
    assert points[1]["deviation"] < 1e-10


# ============== Verdict Tests ==============


async def test_verdict_relaxed_q(client: AsyncClient):
    response = await client.get("/api/v1/verdict", params={"q": 0.5})
    assert response.status_code == 200
    assert response.json()["verdict"] == "SelfAdjointBounded"


async def test_verdict_undeformed(client: AsyncClient):
    response = await client.get("/api/v1/verdict", params={"q": 2, "operator": "undeformed"})
    assert response.status_code == 200
    assert response.json()["verdict"] == "SelfAdjointCarleman"


# ============== Transform and Verify Tests ==============


async def test_transform(client: AsyncClient):
    response = await client.get(
        "/api/v1/transform",
        params={"q": 2, "b": 0.5, "bprime": 0.7, "rmin": -2, "rmax": 2, "validate": 1, "core": True},
    )
    assert response.status_code == 200
    data = response.json()
    assert data["matrix"] == "T"
    assert data["window"] == [-2, 2]


async def test_verify_selected_check(client: AsyncClient):
    response = await client.get("/api/v1/verify", params={"q": 2, "b": 0.5, "check": "total_mass"})
    assert response.status_code == 200
    data = response.json()
    assert data["passed"] is True
    assert data["b_prime"] == 0.5
