"""Toolkit resource providers for MCP"""
import json

from config.benchmark_config import BenchmarkConfig
from descriptors.types import KINDS
from detectors import DETECTORS
from detectors.params import DetectorParams
from harness.conditions import (
    ALOI_FAMILIES,
    EXPOSURE_EVS,
    RESOLUTIONS,
    ROTATION_ANGLES,
    SCALE_FACTORS,
    VIEWPOINT_ANGLES,
)

RESOURCES = [
    {"uri": "featbench://detectors", "name": "Detectors", "mimeType": "application/json"},
    {"uri": "featbench://descriptors", "name": "Descriptors", "mimeType": "application/json"},
    {"uri": "featbench://conditions", "name": "Condition families", "mimeType": "application/json"},
    {"uri": "featbench://defaults", "name": "Default parameters", "mimeType": "application/json"},
]


class ToolkitResources:
    """Read-only descriptions of what the toolkit offers."""

    @staticmethod
    async def read(uri: str) -> str:
        """Read a resource by URI."""

        if uri == "featbench://detectors":
            return json.dumps({"detectors": sorted(DETECTORS)})

        elif uri == "featbench://descriptors":
            return json.dumps({
                "descriptors": [
                    {"tag": k.tag, "code": k.code, "binary": k.binary, "dim": k.dim,
                     "metric": "hamming" if k.binary else "l2"}
                    for k in KINDS.values()
                ]
            })

        elif uri == "featbench://conditions":
            return json.dumps({
                "synthetic": {
                    "exposure": list(EXPOSURE_EVS),
                    "viewpoint": list(VIEWPOINT_ANGLES),
                    "rotation": list(ROTATION_ANGLES),
                    "scale": list(SCALE_FACTORS),
                },
                "aloi": list(ALOI_FAMILIES),
                "resolutions": list(RESOLUTIONS),
            })

        elif uri == "featbench://defaults":
            cfg = BenchmarkConfig(synthetic_subjects=1)
            return json.dumps({
                "detector_params": DetectorParams().model_dump(),
                "eps_pos": cfg.eps_pos,
                "tau": cfg.tau,
                "ratio": cfg.ratio,
                "knn_k": 2,
            })

        return json.dumps({"error": f"Unknown resource: {uri}"})
