import asyncio

import pytest
from fastapi.testclient import TestClient
from sqlalchemy import inspect

from qnetlab import __version__
from qnetlab.db import create_ledger_engine, init_db, normalize_url
from qnetlab.db.connection import DEFAULT_DATABASE_URL
from qnetlab.server import app

SMALL = {"slots": 600, "replications": 1}


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_root_and_health(client):
    body = client.get("/").json()
    assert body["name"] == "qnetlab"
    assert body["version"] == __version__
    assert body["endpoints"]["mcp"] == "/mcp/sse"
    assert client.get("/health").json() == {"status": "healthy"}


def test_presets(client):
    body = client.get("/presets").json()
    assert body["count"] == len(body["presets"])
    assert "switch2-base" in [p["name"] for p in body["presets"]]


def test_run_records_a_run(client):
    resp = client.post("/experiments/run", json={"preset": "switch2-light", "overrides": SMALL})
    assert resp.status_code == 200
    body = resp.json()
    assert body["success"] is True
    assert body["admissibility"]["verdict"] == "strictly-admissible"
    assert body["output_dir"] is None
    run_id = body["run_id"]

    detail = client.get(f"/runs/{run_id}").json()
    assert detail["name"] == "switch2-light"
    assert detail["horizon"] == 600
    assert detail["summary"]["merged"]["mean_backlog"] == pytest.approx(body["merged"]["mean_backlog"])

    listed = client.get("/runs", params={"name": "switch2-light"}).json()
    assert run_id in [r["id"] for r in listed["runs"]]


def test_run_with_inline_config(client, switch_config):
    resp = client.post("/experiments/run", json={"config": switch_config(horizon=500)})
    assert resp.status_code == 200
    assert resp.json()["name"] == "test-switch2"


def test_runs_newest_first(client):
    for seed in (1, 2):
        client.post("/experiments/run", json={"preset": "switch2-light", "overrides": {**SMALL, "seed": seed}})
    runs = client.get("/runs", params={"limit": 2}).json()["runs"]
    assert len(runs) == 2
    assert runs[0]["id"] > runs[1]["id"]
    assert runs[0]["seed"] == 2


def test_unknown_run_is_404(client):
    assert client.get("/runs/999999").status_code == 404


@pytest.mark.parametrize(
    "body",
    [
        {},
        {"preset": "nope"},
        {"preset": "switch2-light", "config": {"policy": "x"}},
        {"preset": "switch2-light", "overrides": {"out": "/tmp/elsewhere"}},
        {"preset": "switch2-light", "overrides": {"slots": 10_000_000}},
    ],
)
def test_bad_run_requests_are_400(client, body):
    resp = client.post("/experiments/run", json=body)
    assert resp.status_code == 400
    assert resp.json()["detail"]


def test_non_json_body_is_400(client):
    resp = client.post("/experiments/run", content=b"not json", headers={"content-type": "application/json"})
    assert resp.status_code == 400


def test_sweep(client):
    resp = client.post(
        "/experiments/sweep",
        json={"preset": "switch2-light", "overrides": SMALL, "grid": [0.5, 1.5]},
    )
    assert resp.status_code == 200
    rows = resp.json()["rows"]
    assert [r["rho"] for r in rows] == [0.5, 1.5]
    assert rows[1]["verdict"] == "inadmissible"
    assert client.post("/experiments/sweep", json={"preset": "switch2-light"}).status_code == 400


def test_capacity(client):
    body = client.post("/capacity", json={"preset": "switch2-light"}).json()
    assert body["verdict"] == "strictly-admissible"
    assert body["margin"] == pytest.approx(0.25, abs=1e-9)
    weights = body["witness"][0]["weights"]
    assert sum(weights.values()) == pytest.approx(1.0)


def test_capacity_zero_load_has_null_margin(client, switch_config):
    body = client.post("/capacity", json={"config": switch_config(rate=0.0)}).json()
    assert body["margin"] is None
    assert body["unbounded"] is True


def test_validate(client, switch_config):
    ok = client.post("/validate", json={"preset": "switch2-overload"}).json()
    assert ok["exit_code"] == 0
    assert ok["warnings"]
    bad = client.post("/validate", json={"config": switch_config(policy="max_scalar(linear)")}).json()
    assert bad["exit_code"] == 1


# ---------------------------------------------------------------------------
# run ledger
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("url,expected", [
    ("postgres://u:p@db:5432/runs", "postgresql+asyncpg://u:p@db:5432/runs"),
    ("postgresql://u:p@db:5432/runs", "postgresql+asyncpg://u:p@db:5432/runs"),
    ("postgresql+asyncpg://u:p@db/runs", "postgresql+asyncpg://u:p@db/runs"),
    ("sqlite+aiosqlite:///x.db", "sqlite+aiosqlite:///x.db"),
    ("", DEFAULT_DATABASE_URL),
    (None, DEFAULT_DATABASE_URL),
])
def test_normalize_url(url, expected):
    assert normalize_url(url) == expected


def test_ledger_engine_uses_the_async_driver():
    eng = create_ledger_engine("postgres://u:p@db:5432/runs")
    assert eng.url.drivername == "postgresql+asyncpg"
    assert eng.url.database == "runs"


def test_init_db_creates_the_runs_table(tmp_path):
    eng = create_ledger_engine(f"sqlite+aiosqlite:///{tmp_path / 'ledger.db'}")

    async def tables():
        await init_db(eng)
        async with eng.connect() as conn:
            names = await conn.run_sync(lambda c: inspect(c).get_table_names())
        await eng.dispose()
        return names

    assert "experiment_runs" in asyncio.run(tables())
