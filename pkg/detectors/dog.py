"""Difference-of-Gaussians scale-space extrema"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from detectors.keypoint import Keypoint, sort_keypoints
from detectors.params import DetectorParams, DogParams
from imaging.filters import MIN_OCTAVE_DIMENSION, build_gaussian_pyramid, difference_of_gaussians
from imaging.image import GrayImage

logger = logging.getLogger(__name__)

TAG = "dog"
MAX_REFINE_ATTEMPTS = 5

# 3x3x3 neighbourhood without its centre
_NEIGHBOURS = np.ones((3, 3, 3), dtype=bool)
_NEIGHBOURS[1, 1, 1] = False


def _derivatives(D: np.ndarray, s: int, y: int, x: int) -> Tuple[np.ndarray, np.ndarray]:
    """Central-difference gradient and Hessian of the DoG stack at (s, y, x), ordered (x, y, s)."""
    c = D[s, y, x]
    dx = 0.5 * (D[s, y, x + 1] - D[s, y, x - 1])
    dy = 0.5 * (D[s, y + 1, x] - D[s, y - 1, x])
    ds = 0.5 * (D[s + 1, y, x] - D[s - 1, y, x])
    dxx = D[s, y, x + 1] - 2 * c + D[s, y, x - 1]
    dyy = D[s, y + 1, x] - 2 * c + D[s, y - 1, x]
    dss = D[s + 1, y, x] - 2 * c + D[s - 1, y, x]
    dxy = 0.25 * (D[s, y + 1, x + 1] - D[s, y + 1, x - 1] - D[s, y - 1, x + 1] + D[s, y - 1, x - 1])
    dxs = 0.25 * (D[s + 1, y, x + 1] - D[s + 1, y, x - 1] - D[s - 1, y, x + 1] + D[s - 1, y, x - 1])
    dys = 0.25 * (D[s + 1, y + 1, x] - D[s + 1, y - 1, x] - D[s - 1, y + 1, x] + D[s - 1, y - 1, x])
    gradient = np.array([dx, dy, ds])
    hessian = np.array([[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]])
    return gradient, hessian


def _localize(
    D: np.ndarray, s: int, y: int, x: int, p: DogParams
) -> Optional[Tuple[float, float, float, float]]:
    """Newton refinement; returns (x, y, s, |D|) in octave units or None when rejected."""
    n_dog, h, w = D.shape
    offset = None
    gradient = hessian = None
    for _ in range(MAX_REFINE_ATTEMPTS):
        gradient, hessian = _derivatives(D, s, y, x)
        offset = -np.linalg.lstsq(hessian, gradient, rcond=None)[0]
        if np.all(np.abs(offset) <= 0.5):
            break
        x += int(round(offset[0]))
        y += int(round(offset[1]))
        s += int(round(offset[2]))
        if not (p.border <= y < h - p.border and p.border <= x < w - p.border and 1 <= s <= p.intervals):
            logger.debug("DoG extremum drifted outside the search volume")
            return None
    else:
        logger.debug("DoG refinement did not converge")
        return None

    value = D[s, y, x] + 0.5 * float(np.dot(gradient, offset))
    if abs(value) < p.contrast_threshold * 255.0:
        return None
    trace = hessian[0, 0] + hessian[1, 1]
    det = hessian[0, 0] * hessian[1, 1] - hessian[0, 1] ** 2
    r = p.edge_ratio
    if det <= 0 or trace * trace * r > (r + 1) ** 2 * det:
        return None
    return x + offset[0], y + offset[1], s + offset[2], abs(value)


def _candidates(D: np.ndarray, p: DogParams) -> np.ndarray:
    """(s, y, x) of strict 26-neighbourhood extrema on DoG indices 1..intervals."""
    upper = ndimage.maximum_filter(D, footprint=_NEIGHBOURS, mode="nearest")
    lower = ndimage.minimum_filter(D, footprint=_NEIGHBOURS, mode="nearest")
    # weak samples cannot survive the contrast test after refinement
    floor = 0.5 * p.contrast_threshold * 255.0
    mask = ((D > upper) | (D < lower)) & (np.abs(D) >= floor)
    mask[0] = mask[-1] = False
    mask[:, : p.border, :] = False
    mask[:, D.shape[1] - p.border:, :] = False
    mask[:, :, : p.border] = False
    mask[:, :, D.shape[2] - p.border:] = False
    return np.argwhere(mask)


def detect_dog(img: GrayImage, p: Optional[DetectorParams] = None) -> List[Keypoint]:
    """Scale-space extrema of the DoG pyramid, refined and filtered."""
    params = (p or DetectorParams()).dog
    if img.min_dimension < MIN_OCTAVE_DIMENSION:
        logger.warning(f"Image {img} is smaller than {MIN_OCTAVE_DIMENSION}px, no DoG keypoints")
        return []

    pyr = build_gaussian_pyramid(
        img, octaves=params.octaves, levels_per_octave=params.levels_per_octave,
        base_sigma=params.base_sigma, k=params.k,
    )
    if pyr.octave_count < params.octaves:
        logger.debug(f"Pyramid truncated to {pyr.octave_count} of {params.octaves} octaves")

    keypoints: List[Keypoint] = []
    for o, octave in enumerate(difference_of_gaussians(pyr)):
        D = np.stack(octave)
        if min(D.shape[1:]) < 2 * params.border + 3:
            continue
        for s, y, x in _candidates(D, params):
            found = _localize(D, int(s), int(y), int(x), params)
            if found is None:
                continue
            fx, fy, fs, response = found
            factor = 2.0 ** o
            kp_x, kp_y = fx * factor, fy * factor
            if not (0 <= kp_x < img.width and 0 <= kp_y < img.height):
                continue
            scale = dog_scale(params.base_sigma, params.k, o, fs)
            keypoints.append(Keypoint(kp_x, kp_y, scale, 0.0, response, o, TAG))

    logger.info(f"DoG found {len(keypoints)} keypoints in {img}")
    return sort_keypoints(keypoints)


def dog_scale(base_sigma: float, k: float, octave: int, level: float) -> float:
    return base_sigma * k ** level * 2.0 ** octave


__all__ = ["detect_dog", "dog_scale", "TAG"]
