"""Haar-wavelet descriptor over a 20s x 20s window"""
import math
from typing import Tuple

import numpy as np

from descriptors.types import FloatDescriptor
from detectors.keypoint import Keypoint
from errors import DegenerateDescriptorError, OutOfBoundsError
from imaging.filters import IntegralImage, box_sums

GRID = 20
SUBREGIONS = 4
SAMPLES_PER_SUBREGION = GRID // SUBREGIONS
WEIGHT_SIGMA = 3.3


def haar_responses(ii: IntegralImage, xs: np.ndarray, ys: np.ndarray, h: int) -> Tuple[np.ndarray, np.ndarray]:
    """First-derivative box pairs of half-size ``h`` centred on integer pixels."""
    dx = box_sums(ii, xs + 1, ys - h, h, 2 * h + 1) - box_sums(ii, xs - h, ys - h, h, 2 * h + 1)
    dy = box_sums(ii, xs - h, ys + 1, 2 * h + 1, h) - box_sums(ii, xs - h, ys - h, 2 * h + 1, h)
    return dx, dy


def haar_subregion_vector(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """(sum dx, sum dy, sum |dx|, sum |dy|) of one subregion."""
    dx = np.asarray(dx, dtype=np.float64)
    dy = np.asarray(dy, dtype=np.float64)
    return np.array([dx.sum(), dy.sum(), np.abs(dx).sum(), np.abs(dy).sum()])


def describe_surf(ii: IntegralImage, kp: Keypoint) -> FloatDescriptor:
    s = kp.scale
    h = max(1, int(round(s)))
    cos_t, sin_t = math.cos(kp.orientation), math.sin(kp.orientation)

    offsets = (np.arange(GRID) - (GRID - 1) / 2.0) * s
    v, u = np.meshgrid(offsets, offsets, indexing="ij")
    px = np.round(kp.x + u * cos_t - v * sin_t).astype(np.int64)
    py = np.round(kp.y + u * sin_t + v * cos_t).astype(np.int64)
    if px.min() - h < 0 or py.min() - h < 0 or px.max() + h + 1 > ii.width or py.max() + h + 1 > ii.height:
        raise OutOfBoundsError(f"SURF window at ({kp.x:.1f}, {kp.y:.1f}) scale {s:.2f} leaves the image")

    dx, dy = haar_responses(ii, px, py, h)
    # responses in the keypoint frame
    rx = dx * cos_t + dy * sin_t
    ry = -dx * sin_t + dy * cos_t
    weight = np.exp(-(u ** 2 + v ** 2) / (2.0 * (WEIGHT_SIGMA * s) ** 2))
    rx, ry = rx * weight, ry * weight

    vector = []
    for i in range(SUBREGIONS):
        for j in range(SUBREGIONS):
            rows = slice(i * SAMPLES_PER_SUBREGION, (i + 1) * SAMPLES_PER_SUBREGION)
            cols = slice(j * SAMPLES_PER_SUBREGION, (j + 1) * SAMPLES_PER_SUBREGION)
            vector.append(haar_subregion_vector(rx[rows, cols], ry[rows, cols]))
    vector = np.concatenate(vector)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise DegenerateDescriptorError(f"all Haar responses vanish at ({kp.x:.1f}, {kp.y:.1f})")
    return FloatDescriptor(vector / norm, "surf")
