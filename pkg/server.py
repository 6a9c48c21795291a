"""
featbench - HTTP server

FastAPI app exposing the toolkit over MCP JSON-RPC plus a few plain endpoints.
"""

import asyncio
import json
import logging
from contextlib import asynccontextmanager
from typing import Any, Dict, Optional

import uvicorn
from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from config.logging_config import configure_logging
from config.settings import ALLOWED_ORIGINS, API_KEY, LOG_FORMAT, LOG_LEVEL, PORT, SERVER_NAME, SERVER_VERSION
from detectors import DETECTORS
from descriptors import DESCRIPTOR_TAGS
from errors import FeatBenchError
from mcp_server import dispatch_tool
from middleware.auth import APIKeyMiddleware
from resources.toolkit_resources import RESOURCES, ToolkitResources
from tools.benchmark_tools import BENCHMARK_TOOLS, BenchmarkTools
from tools.feature_tools import FEATURE_TOOLS, FeatureTools

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Startup and shutdown lifecycle."""
    configure_logging(LOG_LEVEL, LOG_FORMAT)
    logger.info(f"Starting {SERVER_NAME} {SERVER_VERSION} on port {PORT}")
    yield
    logger.info(f"Shutting down {SERVER_NAME}")


app = FastAPI(
    title="featbench",
    description="Keypoint detector/descriptor toolkit and benchmark harness",
    version=SERVER_VERSION,
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=ALLOWED_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

if API_KEY:
    app.add_middleware(APIKeyMiddleware, api_key=API_KEY)
    logger.info("API key authentication enabled")
else:
    logger.warning("No FEATBENCH_API_KEY set - authentication disabled")


@app.exception_handler(FeatBenchError)
async def featbench_error_handler(request: Request, exc: FeatBenchError):
    return JSONResponse(status_code=400, content={"detail": str(exc), "error": type(exc).__name__})


class MCPRequest(BaseModel):
    """MCP JSON-RPC 2.0 request."""
    jsonrpc: str = "2.0"
    method: str
    params: Optional[dict] = None
    id: Optional[int] = None


class DetectRequest(BaseModel):
    image: str
    detector: str
    params: Dict[str, Any] = Field(default_factory=dict)
    limit: int = Field(50, ge=0)


class BenchmarkRequest(BaseModel):
    config: Optional[str] = None
    config_data: Optional[Dict[str, Any]] = None
    out: Optional[str] = None


def _rpc(request_id, result):
    return {"jsonrpc": "2.0", "id": request_id, "result": result}


@app.get("/")
async def root():
    return {
        "name": SERVER_NAME,
        "version": SERVER_VERSION,
        "description": "Keypoint detector/descriptor toolkit and benchmark harness",
        "endpoints": {
            "/": "Server information",
            "/health": "Health check",
            "/mcp": "MCP JSON-RPC endpoint (POST)",
            "/detect": "Detect keypoints in a server-side image (POST)",
            "/benchmarks": "Run a benchmark grid (POST)",
            "/docs": "Interactive API docs",
        },
        "detectors": sorted(DETECTORS),
        "descriptors": list(DESCRIPTOR_TAGS),
    }


@app.get("/health")
async def health_check():
    return {"status": "healthy", "server": SERVER_NAME, "version": SERVER_VERSION}


@app.post("/mcp")
async def mcp_endpoint(request: MCPRequest):
    """MCP JSON-RPC 2.0 endpoint for tools and resources."""
    logger.info(f"MCP request: {request.method}")
    params = request.params or {}

    try:
        if request.method == "initialize":
            return _rpc(request.id, {
                "protocolVersion": "2024-11-05",
                "capabilities": {
                    "tools": {"listChanged": False},
                    "resources": {"subscribe": False, "listChanged": False},
                },
                "serverInfo": {"name": SERVER_NAME, "version": SERVER_VERSION},
            })

        elif request.method == "tools/list":
            return _rpc(request.id, {"tools": FEATURE_TOOLS + BENCHMARK_TOOLS})

        elif request.method == "tools/call":
            tool_name = params.get("name")
            logger.info(f"Calling tool: {tool_name}")
            result = await dispatch_tool(tool_name, params.get("arguments") or {})
            return _rpc(request.id, {"content": [{"type": "text", "text": str(result)}]})

        elif request.method == "resources/list":
            return _rpc(request.id, {"resources": RESOURCES})

        elif request.method == "resources/read":
            uri = params.get("uri")
            content = await ToolkitResources.read(uri)
            return _rpc(request.id, {"contents": [{"uri": uri, "mimeType": "application/json", "text": content}]})

        else:
            raise HTTPException(status_code=400, detail=f"Unknown MCP method: {request.method}")

    except HTTPException:
        raise
    except Exception as e:
        logger.error(f"MCP error: {e}")
        return {"jsonrpc": "2.0", "id": request.id, "error": {"code": -32603, "message": str(e)}}


@app.post("/detect")
async def detect(request: DetectRequest):
    if request.detector not in DETECTORS:
        raise HTTPException(status_code=400, detail=f"Unknown detector: {request.detector}")
    try:
        result = await asyncio.to_thread(FeatureTools.detect, request.image, request.detector,
                                         request.params, request.limit)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return json.loads(result)


@app.post("/benchmarks")
async def run_benchmark(request: BenchmarkRequest):
    result = await asyncio.to_thread(BenchmarkTools.run, request.model_dump())
    return json.loads(result)


if __name__ == "__main__":
    uvicorn.run(
        "server:app",
        host="0.0.0.0",
        port=PORT,
        log_level=LOG_LEVEL.lower(),
    )
