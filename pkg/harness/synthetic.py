"""Deterministic textured test images for running the benchmark without input files"""
from typing import List

import numpy as np
from scipy import ndimage

from imaging.image import GrayImage

SUBJECT_SIZE = 256


def textured_image(seed: int, size: int = SUBJECT_SIZE) -> GrayImage:
    """Multi-scale smoothed noise plus random discs and rectangles, spread over 0..255."""
    rng = np.random.default_rng(seed)
    field = np.zeros((size, size))
    for sigma, weight in ((1.5, 0.4), (4.0, 1.0), (12.0, 1.5)):
        layer = ndimage.gaussian_filter(rng.standard_normal((size, size)), sigma)
        field += weight * layer / (layer.std() or 1.0)

    ys, xs = np.mgrid[0:size, 0:size]
    for _ in range(12):
        cx, cy = rng.uniform(0.1 * size, 0.9 * size, 2)
        r = rng.uniform(4, 18)
        field[(xs - cx) ** 2 + (ys - cy) ** 2 <= r * r] += rng.choice([-2.5, 2.5])
    for _ in range(8):
        x0, y0 = rng.integers(0, size - 24, 2)
        w, h = rng.integers(6, 24, 2)
        field[y0:y0 + h, x0:x0 + w] += rng.choice([-2.0, 2.0])

    field = ndimage.gaussian_filter(field, 0.8)
    lo, hi = np.percentile(field, [1, 99])
    scaled = np.clip((field - lo) / (hi - lo), 0.0, 1.0) * 255.0
    return GrayImage(np.round(scaled))


def synthetic_subjects(count: int, seed: int) -> List[GrayImage]:
    return [textured_image(seed * 1000 + i) for i in range(count)]
