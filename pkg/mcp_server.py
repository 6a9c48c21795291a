"""
MCP Server for featbench

Exposes the detector/descriptor toolkit and the benchmark harness as Model
Context Protocol tools and resources over stdio.
"""

import asyncio
import logging
from typing import Any, Dict, List, Optional

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import Resource, TextContent, Tool

from config.logging_config import configure_logging
from config.settings import LOG_FORMAT, LOG_LEVEL, SERVER_NAME, SERVER_VERSION
from resources.toolkit_resources import RESOURCES, ToolkitResources
from tools.benchmark_tools import BENCHMARK_TOOL_NAMES, BENCHMARK_TOOLS, BenchmarkTools
from tools.feature_tools import FEATURE_TOOL_NAMES, FEATURE_TOOLS, FeatureTools

logger = logging.getLogger(__name__)


async def dispatch_tool(name: str, arguments: Dict[str, Any]) -> str:
    """Route a tool call to its handler."""
    if name in FEATURE_TOOL_NAMES:
        return await FeatureTools.handle(name, arguments)
    if name in BENCHMARK_TOOL_NAMES:
        return await BenchmarkTools.handle(name, arguments)
    return f"Unknown tool: {name}"


class FeatBenchMCPServer:
    """stdio MCP server over the featbench tools."""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config or {}
        self.server = Server(self.config.get("name", SERVER_NAME))

        self._register_tool_handlers()
        self._register_resource_handlers()

        logger.info("featbench MCP server initialized")

    def _register_tool_handlers(self):
        @self.server.list_tools()
        async def list_tools() -> List[Tool]:
            return [Tool(**spec) for spec in FEATURE_TOOLS + BENCHMARK_TOOLS]

        @self.server.call_tool()
        async def call_tool(name: str, arguments: Dict[str, Any]) -> List[TextContent]:
            logger.info(f"Calling tool: {name}")
            try:
                result = await dispatch_tool(name, arguments or {})
            except Exception as e:
                logger.error(f"Error executing tool {name}: {e}")
                result = f"Error: {e}"
            return [TextContent(type="text", text=str(result))]

    def _register_resource_handlers(self):
        @self.server.list_resources()
        async def list_resources() -> List[Resource]:
            return [Resource(**spec) for spec in RESOURCES]

        @self.server.read_resource()
        async def read_resource(uri) -> str:
            logger.info(f"Reading resource: {uri}")
            return await ToolkitResources.read(str(uri))

    async def run(self):
        """Run the MCP server."""
        logger.info("Starting featbench MCP server...")
        async with stdio_server() as (read_stream, write_stream):
            await self.server.run(
                read_stream,
                write_stream,
                self.server.create_initialization_options()
            )


async def main():
    configure_logging(LOG_LEVEL, LOG_FORMAT)
    server = FeatBenchMCPServer({"name": SERVER_NAME, "version": SERVER_VERSION})
    await server.run()


if __name__ == "__main__":
    asyncio.run(main())
