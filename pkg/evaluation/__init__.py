"""Repeatability and match correctness against ground-truth homographies"""
from .repeatability import (
    DEFAULT_EPS_POS,
    DEFAULT_TAU,
    Correspondence,
    RepeatabilityRecord,
    RepeatabilityResult,
    find_correspondences,
    find_correspondences_with_counts,
    project_keypoint,
    repeatability,
    score_matches,
    visible,
)
from .pair import evaluate_image_pair

__all__ = [
    "evaluate_image_pair",
    "DEFAULT_EPS_POS",
    "DEFAULT_TAU",
    "Correspondence",
    "RepeatabilityRecord",
    "RepeatabilityResult",
    "find_correspondences",
    "find_correspondences_with_counts",
    "project_keypoint",
    "repeatability",
    "score_matches",
    "visible",
]
