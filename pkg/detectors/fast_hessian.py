"""Fast-Hessian blob detector over box-filtered integral images"""
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from detectors.keypoint import Keypoint, sort_keypoints
from detectors.params import DetectorParams, FastHessianParams
from imaging.filters import MIN_OCTAVE_DIMENSION, IntegralImage, box_sums, integral_image
from imaging.image import GrayImage

logger = logging.getLogger(__name__)

TAG = "fast_hessian"
BASE_FILTER = 9
BASE_SCALE = 1.2

_NEIGHBOURS = np.ones((3, 3, 3), dtype=bool)
_NEIGHBOURS[1, 1, 1] = False


def hessian_determinant(dxx, dyy, dxy, w: float = 0.9):
    """det(H_approx) = Dxx*Dyy - (w*Dxy)^2."""
    return dxx * dyy - (w * dxy) ** 2


def filter_sizes(octave: int, levels: int) -> List[int]:
    """Box filter side lengths of one octave: 9, 15, 21, 27 for octave 0, step doubling per octave."""
    step = 6 * 2 ** octave
    start = 3 + step
    return [start + i * step for i in range(levels)]


def filter_scale(size: float) -> float:
    return BASE_SCALE * size / BASE_FILTER


def box_hessian(ii: IntegralImage, rows, cols, size: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Area-normalized box second derivatives (Dxx, Dyy, Dxy) centred on (rows, cols)."""
    lobe = size // 3
    border = (size - 1) // 2
    r = np.asarray(rows, dtype=np.int64)
    c = np.asarray(cols, dtype=np.int64)
    inv_area = 1.0 / (size * size)

    # box_sums takes (x0, y0, width, height)
    dxx = (
        box_sums(ii, c - border, r - lobe + 1, size, 2 * lobe - 1)
        - 3.0 * box_sums(ii, c - lobe // 2, r - lobe + 1, lobe, 2 * lobe - 1)
    )
    dyy = (
        box_sums(ii, c - lobe + 1, r - border, 2 * lobe - 1, size)
        - 3.0 * box_sums(ii, c - lobe + 1, r - lobe // 2, 2 * lobe - 1, lobe)
    )
    dxy = (
        box_sums(ii, c + 1, r - lobe, lobe, lobe)
        + box_sums(ii, c - lobe, r + 1, lobe, lobe)
        - box_sums(ii, c - lobe, r - lobe, lobe, lobe)
        - box_sums(ii, c + 1, r + 1, lobe, lobe)
    )
    return dxx * inv_area, dyy * inv_area, dxy * inv_area


def hessian_response_map(ii: IntegralImage, size: int, step: int, w: float = 0.9) -> np.ndarray:
    """Determinant response sampled every ``step`` pixels."""
    rows = np.arange(0, ii.height, step)
    cols = np.arange(0, ii.width, step)
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    dxx, dyy, dxy = box_hessian(ii, rr, cc, size)
    return hessian_determinant(dxx, dyy, dxy, w)


def _refine(R: np.ndarray, s: int, y: int, x: int) -> Optional[np.ndarray]:
    """Quadratic fit offset (dx, dy, ds); None when any component reaches half a cell."""
    c = R[s, y, x]
    g = 0.5 * np.array([
        R[s, y, x + 1] - R[s, y, x - 1],
        R[s, y + 1, x] - R[s, y - 1, x],
        R[s + 1, y, x] - R[s - 1, y, x],
    ])
    dxx = R[s, y, x + 1] - 2 * c + R[s, y, x - 1]
    dyy = R[s, y + 1, x] - 2 * c + R[s, y - 1, x]
    dss = R[s + 1, y, x] - 2 * c + R[s - 1, y, x]
    dxy = 0.25 * (R[s, y + 1, x + 1] - R[s, y + 1, x - 1] - R[s, y - 1, x + 1] + R[s, y - 1, x - 1])
    dxs = 0.25 * (R[s + 1, y, x + 1] - R[s + 1, y, x - 1] - R[s - 1, y, x + 1] + R[s - 1, y, x - 1])
    dys = 0.25 * (R[s + 1, y + 1, x] - R[s + 1, y - 1, x] - R[s - 1, y + 1, x] + R[s - 1, y - 1, x])
    H = np.array([[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]])
    offset = -np.linalg.lstsq(H, g, rcond=None)[0]
    if np.any(np.abs(offset) >= 0.5):
        return None
    return offset


def detect_fast_hessian(img: GrayImage, p: Optional[DetectorParams] = None) -> List[Keypoint]:
    """Non-max-suppressed determinant-of-Hessian blobs on [0, 1] intensities."""
    params: FastHessianParams = (p or DetectorParams()).fast_hessian
    if img.min_dimension < MIN_OCTAVE_DIMENSION:
        logger.warning(f"Image {img} is smaller than {MIN_OCTAVE_DIMENSION}px, no fast-Hessian keypoints")
        return []

    ii = integral_image(GrayImage(img.data / 255.0))
    keypoints: List[Keypoint] = []
    for o in range(params.octaves):
        step = 2 ** o
        sizes = filter_sizes(o, params.levels)
        if sizes[-1] > img.min_dimension:
            logger.debug(f"Fast-Hessian stops before octave {o}: filter {sizes[-1]} exceeds image")
            break
        R = np.stack([hessian_response_map(ii, size, step, params.w) for size in sizes])
        # keep clear of the largest filter's support
        margin = (sizes[-1] + 1) // (2 * step) + 1
        upper = ndimage.maximum_filter(R, footprint=_NEIGHBOURS, mode="nearest")
        mask = (R > upper) & (R >= params.hessian_threshold)
        mask[0] = mask[-1] = False
        mask[:, :margin, :] = False
        mask[:, R.shape[1] - margin:, :] = False
        mask[:, :, :margin] = False
        mask[:, :, R.shape[2] - margin:] = False

        size_step = sizes[1] - sizes[0]
        for s, y, x in np.argwhere(mask):
            offset = _refine(R, int(s), int(y), int(x))
            if offset is None:
                continue
            kp_x = (x + offset[0]) * step
            kp_y = (y + offset[1]) * step
            if not (0 <= kp_x < img.width and 0 <= kp_y < img.height):
                continue
            size = sizes[s] + offset[2] * size_step
            keypoints.append(Keypoint(float(kp_x), float(kp_y), filter_scale(size), 0.0, float(R[s, y, x]), o, TAG))

    logger.info(f"Fast-Hessian found {len(keypoints)} keypoints in {img}")
    return sort_keypoints(keypoints)
