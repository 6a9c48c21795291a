"""Scale-space FAST-9/16 corners with intra-octave layers"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy import ndimage

from detectors.keypoint import Keypoint, sort_keypoints
from detectors.params import BriskParams, DetectorParams
from imaging.filters import MIN_OCTAVE_DIMENSION, gaussian_blur
from imaging.image import GrayImage

logger = logging.getLogger(__name__)

TAG = "brisk"
ARC_LENGTH = 9
RADIUS = 3

# Bresenham circle of radius 3 as (dx, dy), walked contiguously
CIRCLE = np.array([
    (0, 3), (1, 3), (2, 2), (3, 1),
    (3, 0), (3, -1), (2, -2), (1, -3),
    (0, -3), (-1, -3), (-2, -2), (-3, -1),
    (-3, 0), (-3, 1), (-2, 2), (-1, 3),
])

_SPATIAL = np.ones((3, 3), dtype=bool)
_SPATIAL[1, 1] = False


@dataclass(frozen=True, eq=False)
class ScoreLayer:
    scale: float
    scores: np.ndarray


def layer_scales(octaves: int) -> List[float]:
    """Octave and intra-octave scales 2^(i/2), ending on the last octave."""
    return [2.0 ** (i / 2.0) for i in range(2 * octaves - 1)]


def resample_layer(img: GrayImage, scale: float) -> Optional[np.ndarray]:
    """Anti-aliased layer whose pixel (u, v) sits at (u*scale, v*scale) in the input."""
    if scale == 1.0:
        return img.data
    width = int(math.floor((img.width - 1) / scale)) + 1
    height = int(math.floor((img.height - 1) / scale)) + 1
    if min(width, height) < MIN_OCTAVE_DIMENSION:
        return None
    smoothed = gaussian_blur(img, 0.5 * math.sqrt(scale * scale - 1.0)).data
    v, u = np.mgrid[0:height, 0:width].astype(np.float64)
    return ndimage.map_coordinates(smoothed, [v * scale, u * scale], order=1, mode="nearest")


def _has_arc(mask: np.ndarray) -> np.ndarray:
    """True where ``mask`` holds ARC_LENGTH consecutive circle samples (with wrap-around)."""
    wrapped = np.concatenate([mask, mask[: ARC_LENGTH - 1]], axis=0).astype(np.int32)
    csum = np.concatenate([np.zeros((1,) + wrapped.shape[1:], dtype=np.int32), np.cumsum(wrapped, axis=0)])
    windows = csum[ARC_LENGTH:] - csum[:-ARC_LENGTH]
    return np.any(windows == ARC_LENGTH, axis=0)


def fast_score_map(data: np.ndarray, threshold: float) -> np.ndarray:
    """Sum-of-absolute-differences FAST score; zero for non-corners and the 3-pixel border."""
    h, w = data.shape
    scores = np.zeros((h, w), dtype=np.float64)
    if h <= 2 * RADIUS or w <= 2 * RADIUS:
        return scores
    centre = data[RADIUS:h - RADIUS, RADIUS:w - RADIUS]
    ring = np.stack([
        data[RADIUS + dy:h - RADIUS + dy, RADIUS + dx:w - RADIUS + dx] for dx, dy in CIRCLE
    ])
    brighter = ring > centre + threshold
    darker = ring < centre - threshold
    corner = _has_arc(brighter) | _has_arc(darker)
    bright_sad = np.where(brighter, ring - centre - threshold, 0.0).sum(axis=0)
    dark_sad = np.where(darker, centre - ring - threshold, 0.0).sum(axis=0)
    scores[RADIUS:h - RADIUS, RADIUS:w - RADIUS] = np.where(corner, np.maximum(bright_sad, dark_sad), 0.0)
    return scores


def build_score_layers(img: GrayImage, p: BriskParams) -> List[ScoreLayer]:
    layers = []
    for scale in layer_scales(p.octaves):
        data = resample_layer(img, scale)
        if data is None:
            logger.debug(f"BRISK layer at scale {scale:.3f} is too small, skipped")
            continue
        layers.append(ScoreLayer(scale, fast_score_map(data, p.fast_threshold)))
    return layers


def _parabola_peak(left, centre, right):
    denom = left - 2.0 * centre + right
    with np.errstate(divide="ignore", invalid="ignore"):
        offset = np.where(denom != 0, 0.5 * (left - right) / denom, 0.0)
    return np.clip(offset, -0.5, 0.5)


def _sample(layer: ScoreLayer, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear score lookup at input-image coordinates."""
    return ndimage.map_coordinates(layer.scores, [ys / layer.scale, xs / layer.scale], order=1, mode="constant", cval=0.0)


def detect_brisk_corners(img: GrayImage, p: Optional[DetectorParams] = None) -> List[Keypoint]:
    """FAST corners that are maxima in space and across neighbouring layers."""
    params = (p or DetectorParams()).brisk
    if img.min_dimension < MIN_OCTAVE_DIMENSION:
        logger.warning(f"Image {img} is smaller than {MIN_OCTAVE_DIMENSION}px, no BRISK keypoints")
        return []

    layers = build_score_layers(img, params)
    keypoints: List[Keypoint] = []
    for i, layer in enumerate(layers):
        S = layer.scores
        upper = ndimage.maximum_filter(S, footprint=_SPATIAL, mode="constant", cval=0.0)
        vs, us = np.nonzero((S > upper) & (S > 0))
        if len(us) == 0:
            continue
        centre = S[vs, us]
        xs = us * layer.scale
        ys = vs * layer.scale

        keep = np.ones(len(us), dtype=bool)
        neighbours = {}
        for j in (i - 1, i + 1):
            if 0 <= j < len(layers):
                neighbours[j] = _sample(layers[j], xs, ys)
                keep &= centre > neighbours[j]
        if not keep.any():
            continue
        vs, us, centre, xs, ys = vs[keep], us[keep], centre[keep], xs[keep], ys[keep]

        du = _parabola_peak(S[vs, us - 1], centre, S[vs, us + 1])
        dv = _parabola_peak(S[vs - 1, us], centre, S[vs + 1, us])
        if len(neighbours) == 2:
            di = _parabola_peak(neighbours[i - 1][keep], centre, neighbours[i + 1][keep])
        else:
            di = np.zeros(len(us))
        level = math.log2(layer.scale) * 2.0

        for u, v, du_, dv_, di_, score in zip(us, vs, du, dv, di, centre):
            x = (u + du_) * layer.scale
            y = (v + dv_) * layer.scale
            if not (0 <= x < img.width and 0 <= y < img.height):
                continue
            refined = 2.0 ** ((level + di_) / 2.0)
            keypoints.append(Keypoint(float(x), float(y), 2.0 * refined, 0.0, float(score), int(round(level)) // 2, TAG))

    logger.info(f"BRISK found {len(keypoints)} corners in {img}")
    return sort_keypoints(keypoints)
