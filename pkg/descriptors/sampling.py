"""Gaussian-smoothed point sampling for the binary descriptors

Rungs of sigma 4 and above are blurred on a 2^k-decimated copy of the image
and read at (x / 2^k, y / 2^k).
"""
import math
import threading
from typing import Dict, List, Tuple

import numpy as np
from scipy import ndimage

from imaging.filters import MIN_OCTAVE_DIMENSION, gaussian_blur
from imaging.image import GrayImage

BASE_SIGMA = 0.5
RUNGS_PER_OCTAVE = 4
# blur applied before each decimation, in the finer copy's pixels
DECIMATION_SIGMA = 1.0


def rung_index(sigma: np.ndarray) -> np.ndarray:
    """Ladder rung closest to ``sigma`` in log space."""
    sigma = np.maximum(np.asarray(sigma, dtype=np.float64), BASE_SIGMA)
    return np.rint(RUNGS_PER_OCTAVE * np.log2(sigma / BASE_SIGMA)).astype(np.int64)


def rung_sigma(index: int) -> float:
    return BASE_SIGMA * 2.0 ** (index / RUNGS_PER_OCTAVE)


def rung_depth(sigma: float) -> int:
    """Decimation depth: the largest k with 2^k <= sigma / 2 once sigma reaches 4, else 0."""
    return int(math.floor(math.log2(sigma / 2.0) + 1e-9)) if sigma >= 4.0 else 0


class SmoothedSampler:
    """Reads I(p, sigma) from a lazily built ladder of blurred copies of one image."""

    def __init__(self, img: GrayImage):
        self.img = img
        self._rungs: Dict[int, Tuple[GrayImage, int]] = {}
        # (copy, blur it already carries in input pixels), copy k decimated 2^k times
        self._copies: List[Tuple[GrayImage, float]] = [(img, 0.0)]
        self._lock = threading.Lock()

    def _copy(self, depth: int) -> int:
        """Build decimated copies up to ``depth``; returns the depth actually available."""
        while len(self._copies) <= depth:
            finer, carried = self._copies[-1]
            if finer.min_dimension < 2 * MIN_OCTAVE_DIMENSION:
                break
            spacing = 2.0 ** (len(self._copies) - 1)
            coarser = GrayImage(gaussian_blur(finer, DECIMATION_SIGMA).data[::2, ::2])
            self._copies.append((coarser, math.hypot(carried, DECIMATION_SIGMA * spacing)))
        return min(depth, len(self._copies) - 1)

    def rung(self, index: int) -> Tuple[GrayImage, int]:
        """(blurred copy, decimation depth) of one rung."""
        with self._lock:
            entry = self._rungs.get(index)
            if entry is None:
                sigma = rung_sigma(index)
                depth = self._copy(rung_depth(sigma))
                copy, carried = self._copies[depth]
                remaining = math.sqrt(max(sigma * sigma - carried * carried, 0.0)) / 2.0 ** depth
                entry = (gaussian_blur(copy, remaining) if remaining > 0 else copy, depth)
                self._rungs[index] = entry
            return entry

    def sample(self, xs, ys, sigmas) -> np.ndarray:
        """Bilinear samples at (xs, ys), each from the rung matching its sigma."""
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        rungs = rung_index(sigmas)
        values = np.empty(xs.shape, dtype=np.float64)
        for index in np.unique(rungs):
            sel = rungs == index
            copy, depth = self.rung(int(index))
            spacing = 2.0 ** depth
            values[sel] = ndimage.map_coordinates(copy.data, [ys[sel] / spacing, xs[sel] / spacing],
                                                  order=1, mode="nearest")
        return values

    def fits(self, xs, ys, sigmas) -> bool:
        """True when every point and its one-sigma support lies inside the image."""
        xs = np.asarray(xs)
        ys = np.asarray(ys)
        sigmas = np.asarray(sigmas)
        return bool(
            np.all(xs - sigmas >= 0) and np.all(ys - sigmas >= 0)
            and np.all(xs + sigmas <= self.img.width - 1)
            and np.all(ys + sigmas <= self.img.height - 1)
        )
