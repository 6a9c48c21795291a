"""Gradient-histogram descriptor: 4x4 cells x 8 orientation bins"""
import math

import numpy as np

from descriptors.types import FloatDescriptor
from detectors.keypoint import Keypoint
from errors import DegenerateDescriptorError, OutOfBoundsError
from imaging.filters import gradient_field
from imaging.image import GrayImage

WINDOW_WIDTH = 4
NUM_BINS = 8
CELL_FACTOR = 3.0
CLAMP = 0.2


def clamp_normalize(v: np.ndarray, clamp: float = CLAMP) -> np.ndarray:
    """Unit vector u = min(s*v, clamp) for the scale s that makes |u| = 1.

    This is the fixed point of normalize / clamp / renormalize. At least
    1/clamp^2 non-zero entries are needed for it to exist.
    """
    v = np.asarray(v, dtype=np.float64)
    nonzero = int(np.count_nonzero(v > 0))
    if nonzero < int(math.ceil(1.0 / clamp ** 2 - 1e-9)):
        raise DegenerateDescriptorError(f"only {nonzero} non-zero bins, cannot normalize under clamp {clamp}")
    order = np.argsort(-v, kind="stable")
    sv = v[order]
    tail = np.cumsum((sv ** 2)[::-1])[::-1]
    # every non-zero bin saturated unless a smaller clipped head works
    out_sorted = np.where(sv > 0, clamp, 0.0)
    for k in range(nonzero):
        remaining = 1.0 - k * clamp * clamp
        if remaining <= 0 or tail[k] <= 0:
            break
        s = math.sqrt(remaining / tail[k])
        if s * sv[k] <= clamp and (k == 0 or s * sv[k - 1] >= clamp):
            out_sorted = np.minimum(s * sv, clamp)
            out_sorted[:k] = clamp
            break
    out = np.empty_like(out_sorted)
    out[order] = out_sorted
    return out / np.linalg.norm(out)


def describe_sift(level: GrayImage, kp: Keypoint, octave_factor: float = 1.0) -> FloatDescriptor:
    """128-D descriptor of ``kp`` measured on ``level`` (original units / octave_factor)."""
    x, y = kp.x / octave_factor, kp.y / octave_factor
    cell = CELL_FACTOR * kp.scale / octave_factor
    half = int(round(cell * math.sqrt(2.0) * (WINDOW_WIDTH + 1) * 0.5))
    cx, cy = int(round(x)), int(round(y))
    if cx - half < 1 or cy - half < 1 or cx + half > level.width - 2 or cy + half > level.height - 2:
        raise OutOfBoundsError(f"SIFT window of radius {half} at ({x:.1f}, {y:.1f}) leaves {level}")

    patch = level.data[cy - half - 1:cy + half + 2, cx - half - 1:cx + half + 2]
    mag, ori = gradient_field(patch)
    mag, ori = mag[1:-1, 1:-1].ravel(), ori[1:-1, 1:-1].ravel()
    py, px = np.mgrid[cy - half:cy + half + 1, cx - half:cx + half + 1].astype(np.float64)
    dx = (px - x).ravel()
    dy = (py - y).ravel()

    cos_t, sin_t = math.cos(kp.orientation), math.sin(kp.orientation)
    col_rot = (dx * cos_t + dy * sin_t) / cell
    row_rot = (-dx * sin_t + dy * cos_t) / cell
    row_bin = row_rot + 0.5 * WINDOW_WIDTH - 0.5
    col_bin = col_rot + 0.5 * WINDOW_WIDTH - 0.5
    inside = (row_bin > -1) & (row_bin < WINDOW_WIDTH) & (col_bin > -1) & (col_bin < WINDOW_WIDTH)

    weight = np.exp(-(row_rot ** 2 + col_rot ** 2) / (2.0 * (0.5 * WINDOW_WIDTH) ** 2))
    magnitude = (weight * mag)[inside]
    row_bin, col_bin = row_bin[inside], col_bin[inside]
    ori_bin = ((ori[inside] - kp.orientation) * NUM_BINS / (2.0 * math.pi)) % NUM_BINS

    r0 = np.floor(row_bin).astype(np.int64)
    c0 = np.floor(col_bin).astype(np.int64)
    o0 = np.floor(ori_bin).astype(np.int64)
    fr, fc, fo = row_bin - r0, col_bin - c0, ori_bin - o0

    # padded by one cell on every side, orientation wraps
    shape = (WINDOW_WIDTH + 2, WINDOW_WIDTH + 2, NUM_BINS)
    flat_bins, flat_weights = [], []
    for dr, wr in ((0, 1 - fr), (1, fr)):
        for dc, wc in ((0, 1 - fc), (1, fc)):
            for do, wo in ((0, 1 - fo), (1, fo)):
                flat_bins.append(np.ravel_multi_index((r0 + 1 + dr, c0 + 1 + dc, (o0 + do) % NUM_BINS), shape))
                flat_weights.append(magnitude * wr * wc * wo)
    hist = np.bincount(np.concatenate(flat_bins), weights=np.concatenate(flat_weights),
                       minlength=int(np.prod(shape))).reshape(shape)

    vector = hist[1:-1, 1:-1, :].ravel()
    if not np.any(vector > 0):
        raise DegenerateDescriptorError(f"zero-gradient SIFT window at ({kp.x:.1f}, {kp.y:.1f})")
    return FloatDescriptor(clamp_normalize(vector), "sift")
