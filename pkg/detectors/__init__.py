"""Keypoint detectors: DoG, fast-Hessian, MSER and BRISK corners"""
from typing import Callable, Dict, List

from .keypoint import Keypoint, canonical_angle, sort_keypoints
from .params import BriskParams, DetectorParams, DogParams, FastHessianParams, MserParams
from .dog import detect_dog
from .fast_hessian import detect_fast_hessian, hessian_determinant
from .mser import detect_mser, detect_mser_split
from .brisk import detect_brisk_corners
from .export import keypoints_to_csv, read_keypoints_csv, write_keypoints_csv

DETECTORS: Dict[str, Callable[..., List[Keypoint]]] = {
    "dog": detect_dog,
    "fast_hessian": detect_fast_hessian,
    "mser": detect_mser,
    "brisk": detect_brisk_corners,
}

__all__ = [
    "DETECTORS",
    "Keypoint",
    "canonical_angle",
    "sort_keypoints",
    "BriskParams",
    "DetectorParams",
    "DogParams",
    "FastHessianParams",
    "MserParams",
    "detect_dog",
    "detect_fast_hessian",
    "hessian_determinant",
    "detect_mser",
    "detect_mser_split",
    "detect_brisk_corners",
    "keypoints_to_csv",
    "read_keypoints_csv",
    "write_keypoints_csv",
]
