"""
qnetlab service
FastAPI application with REST endpoints and an MCP server over SSE
"""
import json
import logging
import os
from contextlib import asynccontextmanager
from typing import Any, Dict

from fastapi import FastAPI, Request, HTTPException, Depends, Query
from fastapi.middleware.cors import CORSMiddleware
from sqlalchemy.ext.asyncio import AsyncSession

from mcp.server import Server
from mcp.server.sse import SseServerTransport
from mcp.types import Tool, TextContent

from . import __version__
from .db import AsyncSessionLocal, get_db, run_migrations
from .tools import (
    qnetlab_run_experiment,
    qnetlab_sweep,
    qnetlab_check_capacity,
    qnetlab_validate,
    qnetlab_list_presets,
    qnetlab_list_runs,
    qnetlab_get_run,
)

logging.basicConfig(
    level=os.getenv("QNETLAB_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Create the run ledger tables on startup"""
    await run_migrations()
    yield


app = FastAPI(
    title="qnetlab",
    description="Constrained queueing network simulator with max-scalar scheduling",
    version=__version__,
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

mcp_server = Server("qnetlab")
sse = SseServerTransport("/mcp/messages/")


# =============================================================================
# MCP TOOL DEFINITIONS
# =============================================================================

EXPERIMENT_SOURCE = {
    "config": {
        "type": "object",
        "description": "Experiment config (arrivals, constraints, policy, horizon, ...)",
    },
    "preset": {
        "type": "string",
        "description": "Built-in preset name, instead of config (see qnetlab_list_presets)",
    },
    "overrides": {
        "type": "object",
        "description": "Optional seed, slots, replications, allow_unvalidated",
        "properties": {
            "seed": {"type": "integer"},
            "slots": {"type": "integer"},
            "replications": {"type": "integer"},
            "allow_unvalidated": {"type": "boolean"},
        },
    },
}


@mcp_server.list_tools()
async def list_tools() -> list[Tool]:
    """List all available MCP tools"""
    return [
        Tool(
            name="qnetlab_run_experiment",
            description="Simulate a constrained queueing network under a max-scalar policy. Returns the merged stability summary (mean backlog, moments, growth slope, drift profile) and records the run.",
            inputSchema={"type": "object", "properties": EXPERIMENT_SOURCE},
        ),
        Tool(
            name="qnetlab_sweep",
            description="Run an experiment at several load multipliers. Returns one row per multiplier with margin, verdict, mean backlog and stability classification.",
            inputSchema={
                "type": "object",
                "properties": {
                    **EXPERIMENT_SOURCE,
                    "grid": {
                        "type": "array",
                        "items": {"type": "number"},
                        "description": "Load multipliers, e.g. [0.5, 0.9, 1.1]",
                    },
                },
                "required": ["grid"],
            },
        ),
        Tool(
            name="qnetlab_check_capacity",
            description="Check whether the mean arrival load lies inside the capacity region. Returns verdict, margin and the witness convex weights per constraint state.",
            inputSchema={"type": "object", "properties": EXPERIMENT_SOURCE},
        ),
        Tool(
            name="qnetlab_validate",
            description="Validate topology, potential and load without simulating.",
            inputSchema={"type": "object", "properties": EXPERIMENT_SOURCE},
        ),
        Tool(
            name="qnetlab_list_presets",
            description="List the built-in experiment presets.",
            inputSchema={"type": "object", "properties": {}},
        ),
        Tool(
            name="qnetlab_list_runs",
            description="List recorded runs, newest first.",
            inputSchema={
                "type": "object",
                "properties": {
                    "limit": {"type": "integer", "description": "Maximum runs (default 20)"},
                    "name": {"type": "string", "description": "Only runs of this experiment"},
                },
            },
        ),
        Tool(
            name="qnetlab_get_run",
            description="Get one recorded run with its full summary.",
            inputSchema={
                "type": "object",
                "properties": {"run_id": {"type": "integer"}},
                "required": ["run_id"],
            },
        ),
    ]


@mcp_server.call_tool()
async def call_tool(name: str, arguments: dict) -> list[TextContent]:
    """Handle MCP tool calls"""
    arguments = arguments or {}

    async with AsyncSessionLocal() as db:
        tool_map = {
            "qnetlab_run_experiment": lambda: qnetlab_run_experiment(db, **arguments),
            "qnetlab_sweep": lambda: qnetlab_sweep(**arguments),
            "qnetlab_check_capacity": lambda: qnetlab_check_capacity(**arguments),
            "qnetlab_validate": lambda: qnetlab_validate(**arguments),
            "qnetlab_list_presets": lambda: qnetlab_list_presets(),
            "qnetlab_list_runs": lambda: qnetlab_list_runs(db, **arguments),
            "qnetlab_get_run": lambda: qnetlab_get_run(db, **arguments),
        }

        handler = tool_map.get(name)
        if not handler:
            raise ValueError(f"Unknown tool: {name}")

        result = await handler()

    return [TextContent(type="text", text=json.dumps(result, indent=2))]


# =============================================================================
# MCP SSE ENDPOINT
# =============================================================================

@app.get("/mcp/sse")
async def mcp_sse_endpoint(request: Request):
    """MCP Server-Sent Events endpoint"""
    async with sse.connect_sse(request.scope, request.receive, request._send) as (read_stream, write_stream):
        await mcp_server.run(
            read_stream,
            write_stream,
            mcp_server.create_initialization_options()
        )


app.mount("/mcp/messages/", app=sse.handle_post_message)


# =============================================================================
# REST ENDPOINTS - EXPERIMENTS
# =============================================================================

async def _source(request: Request) -> Dict[str, Any]:
    """Experiment source fields of a request body"""
    try:
        body = await request.json()
    except ValueError:
        raise HTTPException(status_code=400, detail="Body must be JSON")
    if not isinstance(body, dict):
        raise HTTPException(status_code=400, detail="Body must be a JSON object")
    return {
        "config": body.get("config"),
        "preset": body.get("preset"),
        "overrides": body.get("overrides"),
        "grid": body.get("grid"),
    }


def _checked(result: Dict[str, Any]) -> Dict[str, Any]:
    if "error" in result:
        raise HTTPException(status_code=400, detail=result["error"])
    return result


@app.post("/experiments/run")
async def run_endpoint(request: Request, db: AsyncSession = Depends(get_db)):
    """
    Simulate an experiment and record it
    Body: {"preset": "switch2-base", "overrides": {"slots": 20000}} or {"config": {...}}
    """
    src = await _source(request)
    src.pop("grid")
    return _checked(await qnetlab_run_experiment(db, **src))


@app.post("/experiments/sweep")
async def sweep_endpoint(request: Request):
    """
    Run an experiment over a load grid
    Body: {"preset": "switch2-base", "grid": [0.5, 0.9, 1.1]}
    """
    src = await _source(request)
    if not src["grid"]:
        raise HTTPException(status_code=400, detail="grid required")
    return _checked(await qnetlab_sweep(**src))


@app.post("/capacity")
async def capacity_endpoint(request: Request):
    """Admissibility verdict, margin and witness"""
    src = await _source(request)
    src.pop("grid")
    return _checked(await qnetlab_check_capacity(**src))


@app.post("/validate")
async def validate_endpoint(request: Request):
    """Topology, potential and admissibility checks"""
    src = await _source(request)
    src.pop("grid")
    return _checked(await qnetlab_validate(**src))


@app.get("/presets")
async def presets_endpoint():
    """Built-in experiment presets"""
    return await qnetlab_list_presets()


@app.get("/runs")
async def runs_endpoint(
    limit: int = Query(20, ge=1, le=200),
    name: str = Query(None),
    db: AsyncSession = Depends(get_db),
):
    """Recorded runs, newest first"""
    return await qnetlab_list_runs(db, limit=limit, name=name)


@app.get("/runs/{run_id}")
async def run_detail_endpoint(run_id: int, db: AsyncSession = Depends(get_db)):
    """One recorded run with its summary"""
    result = await qnetlab_get_run(db, run_id)
    if "error" in result:
        raise HTTPException(status_code=404, detail=result["error"])
    return result


# =============================================================================
# HEALTH CHECK
# =============================================================================

@app.get("/")
async def root():
    """Root endpoint - health check"""
    return {
        "name": "qnetlab",
        "version": __version__,
        "status": "running",
        "endpoints": {
            "mcp": "/mcp/sse",
            "presets": "/presets",
            "run": "/experiments/run",
            "sweep": "/experiments/sweep",
            "capacity": "/capacity",
            "validate": "/validate",
            "runs": "/runs",
        }
    }


@app.get("/health")
async def health():
    """Health check endpoint"""
    return {"status": "healthy"}


# =============================================================================
# RUN SERVER
# =============================================================================

if __name__ == "__main__":
    import uvicorn
    port = int(os.getenv("PORT", "8000"))
    uvicorn.run("qnetlab.server:app", host="0.0.0.0", port=port, reload=False)
