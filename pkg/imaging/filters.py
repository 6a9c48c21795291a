"""Gaussian scale space, integral images and gradients"""
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import ndimage

from errors import InvalidParameterError, OutOfBoundsError
from imaging.image import GrayImage

# Octaves whose smaller side drops below this are not built.
MIN_OCTAVE_DIMENSION = 16
CAMERA_SIGMA = 0.5


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Discrete 1-D Gaussian, radius ceil(3 sigma) (at least 1), summing to 1."""
    if not math.isfinite(sigma) or sigma <= 0:
        raise InvalidParameterError(f"sigma must be positive and finite, got {sigma}")
    radius = max(1, int(math.ceil(3.0 * sigma)))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def _blur_array(data: np.ndarray, sigma: float) -> np.ndarray:
    kernel = gaussian_kernel(sigma)
    out = ndimage.correlate1d(data, kernel, axis=0, mode="nearest")
    return ndimage.correlate1d(out, kernel, axis=1, mode="nearest")


def gaussian_blur(img: GrayImage, sigma: float) -> GrayImage:
    """Separable Gaussian blur with edge-clamp borders; dimensions unchanged."""
    return GrayImage(_blur_array(img.data, sigma))


@dataclass(frozen=True)
class GaussianPyramid:
    """Octaves of progressively blurred images.

    Every level of octave ``o`` is blurred directly from that octave's seed,
    so level ``l`` carries absolute sigma ``base_sigma * k**l * 2**o``.
    """

    octaves: Tuple[Tuple[GrayImage, ...], ...]
    base_sigma: float
    k: float
    requested_octaves: int

    @property
    def octave_count(self) -> int:
        return len(self.octaves)

    @property
    def levels_per_octave(self) -> int:
        return len(self.octaves[0])

    def sigma(self, octave: int, level: int) -> float:
        return self.base_sigma * self.k ** level * 2.0 ** octave

    def level(self, octave: int, level: int) -> GrayImage:
        return self.octaves[octave][level]

    def nearest_level(self, scale: float) -> Tuple[int, int]:
        """(octave, level) whose absolute sigma is closest to ``scale`` in log space."""
        best = (0, 0)
        best_gap = math.inf
        target = math.log(max(scale, 1e-12))
        for o in range(self.octave_count):
            for l in range(self.levels_per_octave):
                gap = abs(math.log(self.sigma(o, l)) - target)
                if gap < best_gap:
                    best_gap = gap
                    best = (o, l)
        return best


def _decimate(data: np.ndarray) -> np.ndarray:
    h, w = data.shape
    return data[: 2 * (h // 2): 2, : 2 * (w // 2): 2]


def build_gaussian_pyramid(
    img: GrayImage,
    octaves: int = 4,
    levels_per_octave: int = 6,
    base_sigma: float = 1.6,
    k: float = 2.0 ** (1.0 / 3.0),
    camera_sigma: float = CAMERA_SIGMA,
) -> GaussianPyramid:
    """Build the scale space; octaves are truncated once a side would drop below 16."""
    if octaves < 1:
        raise InvalidParameterError(f"octaves must be >= 1, got {octaves}")
    if levels_per_octave < 3:
        raise InvalidParameterError(f"levels_per_octave must be >= 3, got {levels_per_octave}")
    if base_sigma <= 0 or k <= 1:
        raise InvalidParameterError(f"need base_sigma > 0 and k > 1, got {base_sigma}, {k}")

    octave_levels: List[Tuple[GrayImage, ...]] = []

    # level index whose sigma doubles the octave base, if the grid hits it exactly
    doubling = int(round(math.log(2.0) / math.log(k)))
    exact_doubling = doubling < levels_per_octave and abs(k ** doubling - 2.0) < 1e-9

    seed = img.data
    seed_sigma = camera_sigma
    for o in range(octaves):
        if o > 0 and min(seed.shape) < MIN_OCTAVE_DIMENSION:
            break
        levels: List[GrayImage] = []
        for l in range(levels_per_octave):
            target = base_sigma * k ** l
            if target > seed_sigma:
                levels.append(GrayImage(_blur_array(seed, math.sqrt(target * target - seed_sigma * seed_sigma))))
            else:
                levels.append(GrayImage(seed))
        octave_levels.append(tuple(levels))

        if exact_doubling:
            parent = levels[doubling].data
        else:
            double = 2.0 * base_sigma
            parent = _blur_array(seed, math.sqrt(double * double - seed_sigma * seed_sigma))
        seed = _decimate(parent)
        seed_sigma = base_sigma

    return GaussianPyramid(
        octaves=tuple(octave_levels),
        base_sigma=base_sigma,
        k=k,
        requested_octaves=octaves,
    )


def difference_of_gaussians(pyr: GaussianPyramid) -> List[List[np.ndarray]]:
    """DoG[o][l] = L[o][l+1] - L[o][l]; responses may be negative."""
    dogs: List[List[np.ndarray]] = []
    for levels in pyr.octaves:
        if len(levels) < 2:
            raise InvalidParameterError("each octave needs at least two levels")
        octave = []
        for lower, upper in zip(levels[:-1], levels[1:]):
            diff = upper.data - lower.data
            diff.setflags(write=False)
            octave.append(diff)
        dogs.append(octave)
    return dogs


@dataclass(frozen=True, eq=False)
class IntegralImage:
    """(height+1) x (width+1) prefix sums with a zero top row and left column."""

    table: np.ndarray

    @property
    def width(self) -> int:
        return self.table.shape[1] - 1

    @property
    def height(self) -> int:
        return self.table.shape[0] - 1


def integral_image(img: GrayImage) -> IntegralImage:
    table = np.zeros((img.height + 1, img.width + 1), dtype=np.float64)
    table[1:, 1:] = img.data.cumsum(axis=0).cumsum(axis=1)
    table.setflags(write=False)
    return IntegralImage(table)


def box_sum(ii: IntegralImage, x0: int, y0: int, w: int, h: int) -> float:
    """Sum over the pixel rectangle [x0, x0+w) x [y0, y0+h), clipped to the image."""
    if w <= 0 or h <= 0:
        raise InvalidParameterError(f"box needs positive size, got {w}x{h}")
    x1 = min(max(x0, 0), ii.width)
    x2 = min(max(x0 + w, 0), ii.width)
    y1 = min(max(y0, 0), ii.height)
    y2 = min(max(y0 + h, 0), ii.height)
    if x2 <= x1 or y2 <= y1:
        return 0.0
    t = ii.table
    return float(t[y2, x2] - t[y1, x2] - t[y2, x1] + t[y1, x1])


def box_sums(ii: IntegralImage, x0, y0, w, h) -> np.ndarray:
    """Vectorized box_sum; every argument broadcasts."""
    x0 = np.asarray(x0, dtype=np.int64)
    y0 = np.asarray(y0, dtype=np.int64)
    w = np.asarray(w, dtype=np.int64)
    h = np.asarray(h, dtype=np.int64)
    if np.any(w <= 0) or np.any(h <= 0):
        raise InvalidParameterError("box needs positive size")
    x1 = np.clip(x0, 0, ii.width)
    x2 = np.clip(x0 + w, 0, ii.width)
    y1 = np.clip(y0, 0, ii.height)
    y2 = np.clip(y0 + h, 0, ii.height)
    t = ii.table
    sums = t[y2, x2] - t[y1, x2] - t[y2, x1] + t[y1, x1]
    return np.where((x2 > x1) & (y2 > y1), sums, 0.0)


def _canonical_angle(theta):
    """Map -pi onto pi so orientations live in (-pi, pi]."""
    return np.where(theta <= -math.pi, math.pi, theta)


def gradient_mag_ori(L: GrayImage, x: int, y: int) -> Tuple[float, float]:
    """Central-difference magnitude and orientation at an interior pixel."""
    if not (1 <= x <= L.width - 2 and 1 <= y <= L.height - 2):
        raise OutOfBoundsError(f"pixel ({x}, {y}) has no central-difference neighbourhood in {L}")
    data = L.data
    dx = data[y, x + 1] - data[y, x - 1]
    dy = data[y + 1, x] - data[y - 1, x]
    m = math.hypot(dx, dy)
    if m == 0.0:
        return 0.0, 0.0
    theta = math.atan2(dy, dx)
    if theta <= -math.pi:
        theta = math.pi
    return m, theta


def gradient_field(data: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Magnitude and orientation arrays; border rows and columns are zero."""
    dx = np.zeros_like(data, dtype=np.float64)
    dy = np.zeros_like(data, dtype=np.float64)
    dx[:, 1:-1] = data[:, 2:] - data[:, :-2]
    dy[1:-1, :] = data[2:, :] - data[:-2, :]
    dx[:, 0] = dx[:, -1] = 0.0
    dy[0, :] = dy[-1, :] = 0.0
    mag = np.hypot(dx, dy)
    ori = np.where(mag > 0, _canonical_angle(np.arctan2(dy, dx)), 0.0)
    return mag, ori
