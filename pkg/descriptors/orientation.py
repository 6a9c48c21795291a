"""Dominant gradient orientations from a weighted 36-bin histogram"""
import logging
import math
from typing import List

import numpy as np

from detectors.keypoint import Keypoint
from imaging.filters import gradient_field
from imaging.image import GrayImage

logger = logging.getLogger(__name__)

NUM_BINS = 36
RADIUS_FACTOR = 3.0
SIGMA_FACTOR = 1.5
PEAK_RATIO = 0.8


def orientation_histogram(level: GrayImage, x: float, y: float, sigma: float):
    """Smoothed histogram around (x, y) in level pixels, or None when the window leaves the level."""
    weight_sigma = SIGMA_FACTOR * sigma
    radius = RADIUS_FACTOR * weight_sigma
    r = int(math.ceil(radius))
    cx, cy = int(round(x)), int(round(y))
    if cx - r < 1 or cy - r < 1 or cx + r > level.width - 2 or cy + r > level.height - 2:
        return None

    patch = level.data[cy - r - 1:cy + r + 2, cx - r - 1:cx + r + 2]
    mag, ori = gradient_field(patch)
    mag, ori = mag[1:-1, 1:-1], ori[1:-1, 1:-1]
    py, px = np.mgrid[cy - r:cy + r + 1, cx - r:cx + r + 1].astype(np.float64)
    d2 = (px - x) ** 2 + (py - y) ** 2
    inside = d2 <= radius * radius
    weights = np.exp(-d2 / (2.0 * weight_sigma * weight_sigma)) * mag

    bins = np.round(ori * NUM_BINS / (2.0 * math.pi)).astype(np.int64) % NUM_BINS
    raw = np.bincount(bins[inside], weights=weights[inside], minlength=NUM_BINS)
    smooth = (
        6.0 * raw
        + 4.0 * (np.roll(raw, 1) + np.roll(raw, -1))
        + np.roll(raw, 2) + np.roll(raw, -2)
    ) / 16.0
    return smooth


def dominant_orientations(hist: np.ndarray) -> List[float]:
    """Interpolated angles of local peaks reaching 80% of the maximum."""
    peak = hist.max()
    if peak <= 0:
        return []
    left = np.roll(hist, 1)
    right = np.roll(hist, -1)
    angles = []
    for i in np.flatnonzero((hist > left) & (hist > right) & (hist >= PEAK_RATIO * peak)):
        l, c, rr = left[i], hist[i], right[i]
        denom = l - 2.0 * c + rr
        offset = 0.5 * (l - rr) / denom if denom != 0 else 0.0
        angles.append((i + offset) * 2.0 * math.pi / NUM_BINS)
    return angles


def assign_orientation(level: GrayImage, kp: Keypoint, octave_factor: float = 1.0) -> List[Keypoint]:
    """One keypoint copy per dominant orientation; empty when the window leaves the level.

    ``octave_factor`` converts original-image units to level pixels.
    """
    x, y, sigma = kp.x / octave_factor, kp.y / octave_factor, kp.scale / octave_factor
    hist = orientation_histogram(level, x, y, sigma)
    if hist is None:
        logger.debug(f"Orientation window of keypoint at ({kp.x:.1f}, {kp.y:.1f}) leaves the image")
        return []
    return [kp.with_orientation(theta) for theta in dominant_orientations(hist)]
