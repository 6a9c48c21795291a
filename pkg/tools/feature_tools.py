"""Feature toolkit tools for MCP"""
import asyncio
import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from descriptors import DESCRIPTOR_TAGS, describe_keypoints, read_descriptors, write_descriptors
from detectors import DETECTORS
from detectors.params import DetectorParams
from errors import FeatBenchError
from evaluation import evaluate_image_pair
from harness import SYNTHETIC_FAMILIES, generate_series
from imaging.geometry import Homography
from imaging.io import load_homography, load_image, save_homography, save_pgm
from matching import DEFAULT_RATIO, match_descriptors

logger = logging.getLogger(__name__)

FEATURE_TOOLS: List[Dict[str, Any]] = [
    {
        "name": "detect_keypoints",
        "description": "Detect keypoints in a PGM/PNG image on the server",
        "inputSchema": {
            "type": "object",
            "properties": {
                "image": {"type": "string", "description": "Image path"},
                "detector": {"type": "string", "enum": sorted(DETECTORS)},
                "params": {"type": "object", "description": "Detector parameters, keyed by detector", "default": {}},
                "limit": {"type": "integer", "default": 50},
            },
            "required": ["image", "detector"],
        },
    },
    {
        "name": "describe_keypoints",
        "description": "Detect and describe keypoints, writing an FDSC descriptor container",
        "inputSchema": {
            "type": "object",
            "properties": {
                "image": {"type": "string"},
                "detector": {"type": "string", "enum": sorted(DETECTORS)},
                "descriptor": {"type": "string", "enum": list(DESCRIPTOR_TAGS)},
                "params": {"type": "object", "description": "Detector parameters, keyed by detector", "default": {}},
                "out": {"type": "string", "description": "Container path to write"},
            },
            "required": ["image", "detector", "descriptor", "out"],
        },
    },
    {
        "name": "match_descriptors",
        "description": "kNN (k=2) matching with the ratio test between two FDSC files",
        "inputSchema": {
            "type": "object",
            "properties": {
                "desc_a": {"type": "string"},
                "desc_b": {"type": "string"},
                "ratio": {"type": "number", "default": DEFAULT_RATIO},
                "limit": {"type": "integer", "default": 50},
            },
            "required": ["desc_a", "desc_b"],
        },
    },
    {
        "name": "evaluate_pair",
        "description": "Repeatability and match correctness of an image pair under a known homography",
        "inputSchema": {
            "type": "object",
            "properties": {
                "image_a": {"type": "string"},
                "image_b": {"type": "string"},
                "homography": {"type": "string", "description": "Path to a 3x3 homography text file"},
                "matrix": {"type": "array", "description": "Inline 3x3 homography (used when no path is given)"},
                "detector": {"type": "string", "enum": sorted(DETECTORS)},
                "descriptor": {"type": "string", "enum": list(DESCRIPTOR_TAGS)},
                "eps_pos": {"type": "number", "default": 2.5},
                "tau": {"type": "number", "default": 2.0},
            },
            "required": ["image_a", "image_b", "detector"],
        },
    },
    {
        "name": "synthesize_conditions",
        "description": "Write a synthetic condition series with ground-truth homographies",
        "inputSchema": {
            "type": "object",
            "properties": {
                "image": {"type": "string"},
                "family": {"type": "string", "enum": list(SYNTHETIC_FAMILIES)},
                "out": {"type": "string"},
            },
            "required": ["image", "family", "out"],
        },
    },
]

FEATURE_TOOL_NAMES = {tool["name"] for tool in FEATURE_TOOLS}


def _check_tag(value: str, allowed, what: str) -> str:
    if value not in allowed:
        raise ValueError(f"unknown {what} {value!r}, expected one of {sorted(allowed)}")
    return value


class FeatureTools:
    """Detection, description, matching and evaluation on server-side files."""

    @staticmethod
    async def handle(name: str, arguments: Dict[str, Any]) -> str:
        """Handle feature tool calls."""
        try:
            if name == "detect_keypoints":
                return await asyncio.to_thread(
                    FeatureTools.detect,
                    arguments["image"], arguments["detector"],
                    arguments.get("params") or {}, arguments.get("limit", 50),
                )
            elif name == "describe_keypoints":
                return await asyncio.to_thread(
                    FeatureTools.describe,
                    arguments["image"], arguments["detector"], arguments["descriptor"], arguments["out"],
                    arguments.get("params") or {},
                )
            elif name == "match_descriptors":
                return await asyncio.to_thread(
                    FeatureTools.match,
                    arguments["desc_a"], arguments["desc_b"],
                    arguments.get("ratio", DEFAULT_RATIO), arguments.get("limit", 50),
                )
            elif name == "evaluate_pair":
                return await asyncio.to_thread(FeatureTools.evaluate, arguments)
            elif name == "synthesize_conditions":
                return await asyncio.to_thread(
                    FeatureTools.synthesize, arguments["image"], arguments["family"], arguments["out"],
                )
        except KeyError as e:
            return f"Error: missing argument {e}"
        except (FeatBenchError, ValueError) as e:
            logger.warning(f"Tool {name} failed: {e}")
            return f"Error: {e}"

        return f"Unknown feature tool: {name}"

    @staticmethod
    def detect(image: str, detector: str, params: Dict[str, Any], limit: int) -> str:
        _check_tag(detector, DETECTORS, "detector")
        keypoints = DETECTORS[detector](load_image(image), DetectorParams.model_validate(params))
        return json.dumps({
            "detector": detector,
            "count": len(keypoints),
            "keypoints": [
                {"x": kp.x, "y": kp.y, "scale": kp.scale, "response": kp.response, "octave": kp.octave}
                for kp in keypoints[:limit]
            ],
        })

    @staticmethod
    def describe(image: str, detector: str, descriptor: str, out: str, params: Dict[str, Any]) -> str:
        _check_tag(detector, DETECTORS, "detector")
        _check_tag(descriptor, DESCRIPTOR_TAGS, "descriptor")
        img = load_image(image)
        keypoints = DETECTORS[detector](img, DetectorParams.model_validate(params))
        extraction = describe_keypoints(img, keypoints, descriptor)
        write_descriptors(extraction.descriptors, out)
        return json.dumps({
            "descriptor": descriptor,
            "detected": len(keypoints),
            "count": len(extraction.descriptors),
            "dropped": extraction.dropped,
            "out": out,
        })

    @staticmethod
    def match(desc_a: str, desc_b: str, ratio: float, limit: int) -> str:
        pairs = match_descriptors(read_descriptors(desc_a), read_descriptors(desc_b), ratio)
        return json.dumps({
            "n_matches": len(pairs),
            "matches": [
                {"query_index": p.query_index, "train_index": p.train_index, "distance": p.distance}
                for p in pairs[:limit]
            ],
        })

    @staticmethod
    def evaluate(arguments: Dict[str, Any]) -> str:
        _check_tag(arguments["detector"], DETECTORS, "detector")
        if arguments.get("homography"):
            H = load_homography(arguments["homography"])
        elif arguments.get("matrix") is not None:
            H = Homography(np.asarray(arguments["matrix"], dtype=np.float64))
        else:
            H = Homography.identity()
        summary = evaluate_image_pair(
            load_image(arguments["image_a"]), load_image(arguments["image_b"]), H,
            arguments["detector"], arguments.get("descriptor"),
            eps_pos=arguments.get("eps_pos", 2.5), tau=arguments.get("tau", 2.0),
        )
        return json.dumps(summary)

    @staticmethod
    def synthesize(image: str, family: str, out: str) -> str:
        _check_tag(family, SYNTHETIC_FAMILIES, "family")
        img = load_image(image)
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(image).stem
        written = []
        for spec, variant in generate_series(img, family):
            name = f"{stem}_{family}_{spec.parameter:g}"
            save_pgm(variant, out_dir / f"{name}.pgm")
            save_homography(spec.ground_truth, out_dir / f"{name}.H.txt")
            written.append(name)
        return json.dumps({"family": family, "variants": written, "out": str(out_dir)})
