"""Sampling patterns of the two binary descriptors

Points are given in pattern units; a descriptor scales them by
``unit * kp.scale`` and rotates them by the measured pattern orientation.
"""
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from descriptors.types import BINARY_BITS

BRISK_RADII = (0.0, 2.9, 4.9, 7.4, 10.8)
BRISK_COUNTS = (1, 10, 14, 15, 20)
BRISK_UNIT = 0.55
BRISK_LONG_MIN = 13.67
BRISK_SIGMA_FACTOR = 0.25
BRISK_MIN_SIGMA = 0.5

FREAK_BIG_R = 2.0 / 3.0
FREAK_SMALL_R = 2.0 / 24.0
FREAK_UNIT_SPACE = (FREAK_BIG_R - FREAK_SMALL_R) / 21.0
FREAK_RADII = (
    FREAK_BIG_R,
    FREAK_BIG_R - 6 * FREAK_UNIT_SPACE,
    FREAK_BIG_R - 11 * FREAK_UNIT_SPACE,
    FREAK_BIG_R - 15 * FREAK_UNIT_SPACE,
    FREAK_BIG_R - 18 * FREAK_UNIT_SPACE,
    FREAK_BIG_R - 20 * FREAK_UNIT_SPACE,
    FREAK_SMALL_R,
    0.0,
)
FREAK_POINTS_PER_RING = 6
FREAK_UNIT = 22.0 * 0.4
FREAK_USAGE_STEP = 12
# within one ring of six: opposite points and points two apart
FREAK_RING_PAIRS = ((0, 3), (1, 4), (2, 5), (0, 2), (1, 3), (2, 4), (3, 5), (4, 0), (5, 1))
FREAK_ORIENTATION_RINGS = 5


@dataclass(frozen=True, eq=False)
class SamplingPattern:
    name: str
    points: np.ndarray
    sigmas: np.ndarray
    short_pairs: np.ndarray
    long_pairs: np.ndarray
    unit: float

    @property
    def size(self) -> int:
        return len(self.points)

    def placed(self, x: float, y: float, scale: float, angle: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Image coordinates and sigmas of the pattern at a keypoint, rotated by ``angle``."""
        k = self.unit * scale
        c, s = math.cos(angle), math.sin(angle)
        px, py = self.points[:, 0], self.points[:, 1]
        xs = x + k * (c * px - s * py)
        ys = y + k * (s * px + c * py)
        return xs, ys, k * self.sigmas


def pair_distances(points: np.ndarray) -> List[Tuple[float, int, int]]:
    out = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            out.append((float(np.hypot(*(points[j] - points[i]))), i, j))
    return out


def _freeze(arr) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


def build_brisk_pattern() -> SamplingPattern:
    points, sigmas = [], []
    for radius, count in zip(BRISK_RADII, BRISK_COUNTS):
        for k in range(count):
            theta = 2.0 * math.pi * k / count
            points.append((radius * math.cos(theta), radius * math.sin(theta)))
            sigmas.append(max(BRISK_MIN_SIGMA, BRISK_SIGMA_FACTOR * radius))
    points = np.array(points)
    pairs = pair_distances(points)
    # ties fall back to lexicographic point indices
    short = sorted((d, i, j) for d, i, j in pairs)[:BINARY_BITS]
    long = [(i, j) for d, i, j in pairs if d > BRISK_LONG_MIN]
    return SamplingPattern(
        name="brisk",
        points=_freeze(points),
        sigmas=_freeze(sigmas),
        short_pairs=_freeze([(i, j) for _, i, j in short]),
        long_pairs=_freeze(long),
        unit=BRISK_UNIT,
    )


def select_freak_pairs(points: np.ndarray, count: int = BINARY_BITS, step: int = FREAK_USAGE_STEP) -> List[Tuple[int, int]]:
    """Longest pairs first, skipping pairs whose endpoints are used ``cap`` times.

    The cap starts at ``step`` and grows by ``step`` until ``count`` pairs are kept.
    """
    ranked = sorted(pairs_by_length(points))
    cap = step
    while True:
        usage = np.zeros(len(points), dtype=np.int64)
        chosen = []
        for _, i, j in ranked:
            if usage[i] < cap and usage[j] < cap:
                chosen.append((i, j))
                usage[i] += 1
                usage[j] += 1
                if len(chosen) == count:
                    return chosen
        cap += step


def pairs_by_length(points: np.ndarray) -> List[Tuple[float, int, int]]:
    """(-distance, i, j) so an ascending sort yields longest first."""
    return [(-d, i, j) for d, i, j in pair_distances(points)]


def build_freak_pattern() -> SamplingPattern:
    points, sigmas = [], []
    for ring, radius in enumerate(FREAK_RADII):
        count = 1 if radius == 0.0 else FREAK_POINTS_PER_RING
        beta = (math.pi / count) * (ring % 2)
        for k in range(count):
            alpha = 2.0 * math.pi * k / count + beta
            points.append((radius * math.cos(alpha), radius * math.sin(alpha)))
        sigma = (FREAK_RADII[6] if radius == 0.0 else radius) / 2.0
        sigmas.extend([sigma] * count)
    points = np.array(points)

    orientation = [
        (ring * FREAK_POINTS_PER_RING + a, ring * FREAK_POINTS_PER_RING + b)
        for ring in range(FREAK_ORIENTATION_RINGS)
        for a, b in FREAK_RING_PAIRS
    ]
    return SamplingPattern(
        name="freak",
        points=_freeze(points),
        sigmas=_freeze(sigmas),
        short_pairs=_freeze(select_freak_pairs(points)),
        long_pairs=_freeze(orientation),
        unit=FREAK_UNIT,
    )


BRISK_PATTERN = build_brisk_pattern()
FREAK_PATTERN = build_freak_pattern()


def pattern_gradient(points: np.ndarray, intensities: np.ndarray, pairs: Sequence[Tuple[int, int]]) -> Tuple[float, float]:
    """Mean of (I_j - I_i)(p_j - p_i)/|p_j - p_i|^2 over ``pairs``."""
    pairs = np.asarray(pairs)
    i, j = pairs[:, 0], pairs[:, 1]
    delta = points[j] - points[i]
    dist2 = (delta ** 2).sum(axis=1)
    diff = intensities[j] - intensities[i]
    g = (diff[:, None] * delta / dist2[:, None]).mean(axis=0)
    return float(g[0]), float(g[1])


def pattern_angle(gx: float, gy: float) -> float:
    if gx == 0.0 and gy == 0.0:
        return 0.0
    return math.atan2(gy, gx)


def binary_tests(intensities: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    """Bit k is set iff I(p_j) > I(p_i) for pair k = (i, j); equality clears it."""
    return intensities[pairs[:, 1]] > intensities[pairs[:, 0]]
