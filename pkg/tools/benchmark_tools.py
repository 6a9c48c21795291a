"""Benchmark tools for MCP"""
import asyncio
import json
import logging
from pathlib import Path
from typing import Any, Dict, List

from config.benchmark_config import BenchmarkConfig, load_config
from errors import FeatBenchError
from harness import ensure_success, run_benchmark, write_report

logger = logging.getLogger(__name__)

BENCHMARK_TOOLS: List[Dict[str, Any]] = [
    {
        "name": "run_benchmark",
        "description": "Run the detector x descriptor benchmark grid and write CSV/SVG reports",
        "inputSchema": {
            "type": "object",
            "properties": {
                "config": {"type": "string", "description": "Path to a .json or .toml benchmark config"},
                "config_data": {"type": "object", "description": "Inline benchmark config"},
                "out": {"type": "string", "description": "Override the output directory"},
            },
        },
    },
]

BENCHMARK_TOOL_NAMES = {tool["name"] for tool in BENCHMARK_TOOLS}


class BenchmarkTools:
    """Runs benchmarks in a worker thread."""

    @staticmethod
    async def handle(name: str, arguments: Dict[str, Any]) -> str:
        """Handle benchmark tool calls."""
        if name == "run_benchmark":
            try:
                return await asyncio.to_thread(BenchmarkTools.run, arguments)
            except FeatBenchError as e:
                logger.warning(f"Benchmark failed: {e}")
                return f"Error: {e}"
        return f"Unknown benchmark tool: {name}"

    @staticmethod
    def resolve_config(arguments: Dict[str, Any]) -> BenchmarkConfig:
        if arguments.get("config"):
            cfg = load_config(arguments["config"])
        else:
            cfg = BenchmarkConfig.from_mapping(arguments.get("config_data") or {})
        if arguments.get("out"):
            cfg = cfg.model_copy(update={"output_dir": Path(arguments["out"])})
        return cfg

    @staticmethod
    def run(arguments: Dict[str, Any]) -> str:
        cfg = BenchmarkTools.resolve_config(arguments)
        report = run_benchmark(cfg)
        files = write_report(report, cfg.output_dir)
        ensure_success(report)
        return json.dumps({
            "cells": len(report.records),
            "failed": len(report.failures),
            "wall_time_s": round(report.wall_time_s, 3),
            "config_digest": report.config_digest,
            "files": [str(f) for f in files],
        })
