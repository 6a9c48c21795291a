"""Evaluate one image pair end to end: detect, optionally describe and match, then score"""
from typing import Any, Dict, Optional

from descriptors.extractors import describe_keypoints
from detectors import DETECTORS
from detectors.params import DetectorParams
from evaluation.repeatability import DEFAULT_EPS_POS, DEFAULT_TAU, find_correspondences_with_counts, score_matches
from imaging.geometry import Homography
from imaging.image import GrayImage
from matching.matcher import DEFAULT_RATIO, match_descriptors


def evaluate_image_pair(
    img_a: GrayImage,
    img_b: GrayImage,
    H: Homography,
    detector: str,
    descriptor: Optional[str] = None,
    params: Optional[DetectorParams] = None,
    eps_pos: float = DEFAULT_EPS_POS,
    tau: float = DEFAULT_TAU,
    ratio: float = DEFAULT_RATIO,
) -> Dict[str, Any]:
    params = params or DetectorParams()
    kps_a = DETECTORS[detector](img_a, params)
    kps_b = DETECTORS[detector](img_b, params)
    counts = find_correspondences_with_counts(
        kps_a, kps_b, H, (img_a.width, img_a.height), (img_b.width, img_b.height), eps_pos, tau
    )
    summary: Dict[str, Any] = {
        "detector": detector,
        "n_kp_a": len(kps_a),
        "n_kp_b": len(kps_b),
        "visible_a": counts.visible_a,
        "visible_b": counts.visible_b,
        "n_correspondences": len(counts.correspondences),
        "repeatability": counts.repeatability,
    }
    if descriptor:
        ext_a = describe_keypoints(img_a, kps_a, descriptor)
        ext_b = describe_keypoints(img_b, kps_b, descriptor)
        pairs = match_descriptors(ext_a.descriptors, ext_b.descriptors, ratio)
        correct, total = score_matches(pairs, ext_a.keypoints, ext_b.keypoints, H, eps_pos)
        summary.update(descriptor=descriptor, n_matches=total, n_correct=correct)
    return summary
