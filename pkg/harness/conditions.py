"""Synthetic condition generators and resolution scaling

Every synthetic family carries the exact homography that maps reference
pixels to test pixels; photometric families carry the identity.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from imaging.filters import gaussian_blur
from imaging.geometry import Homography, exact_cos_sin, warp_homography
from imaging.image import GrayImage
from imaging.photometric import adjust_exposure

SYNTHETIC_FAMILIES = ("exposure", "viewpoint", "rotation", "scale")
ALOI_FAMILIES = ("aloi_illum_dir", "aloi_illum_color", "aloi_view", "aloi_stereo")
FAMILIES = SYNTHETIC_FAMILIES + ALOI_FAMILIES

EXPOSURE_EVS = (-7.0, -4.0, 4.0, 7.0)
VIEWPOINT_ANGLES = (-60.0, -40.0, -20.0, 20.0, 40.0, 60.0)
ROTATION_ANGLES = (15.0, 30.0, 45.0, 90.0)
SCALE_FACTORS = (0.5, 0.71, 1.41, 2.0)
RESOLUTIONS = (1.0, 0.5, 0.25)

Parameter = Union[float, str]


@dataclass(frozen=True)
class ConditionSpec:
    """One test condition; ``ground_truth`` is None when no planar model relates the pair."""

    family: str
    parameter: Parameter
    ground_truth: Optional[Homography]

    @property
    def label(self) -> str:
        if isinstance(self.parameter, str):
            return f"{self.family}={self.parameter}"
        return f"{self.family}={self.parameter:g}"

    def sort_key(self) -> Tuple:
        if isinstance(self.parameter, str):
            return (self.family, 1, 0.0, self.parameter)
        return (self.family, 0, float(self.parameter), "")


Variant = Tuple[ConditionSpec, GrayImage]


def generate_exposure_series(img: GrayImage, evs: Sequence[float] = EXPOSURE_EVS) -> List[Variant]:
    identity = Homography.identity()
    return [(ConditionSpec("exposure", float(ev), identity), adjust_exposure(img, ev)) for ev in evs]


def viewpoint_homography(width: int, height: int, degrees: float) -> Homography:
    """Pinhole camera rotated about the vertical axis: K R_y K^-1 with f = width.

    The rotation moves the principal point by f tan t along x; a translation
    afterwards brings the image centre back onto itself.
    """
    c, s = exact_cos_sin(degrees)
    f = float(width)
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    K = np.array([[f, 0.0, cx], [0.0, f, cy], [0.0, 0.0, 1.0]])
    R = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    camera = Homography(K @ R @ np.linalg.inv(K))
    px, py, _ = camera.apply(cx, cy)
    return Homography.translation(cx - float(px), cy - float(py)) @ camera


def generate_viewpoint_series(img: GrayImage, angles: Sequence[float] = VIEWPOINT_ANGLES) -> List[Variant]:
    out = []
    for angle in angles:
        H = viewpoint_homography(img.width, img.height, angle)
        out.append((ConditionSpec("viewpoint", float(angle), H), warp_homography(img, H, img.width, img.height).image))
    return out


def _canvas_size(width: int, height: int, H: Homography) -> Tuple[int, int]:
    xs = np.array([0.0, width - 1, 0.0, width - 1])
    ys = np.array([0.0, 0.0, height - 1, height - 1])
    px, py, _ = H.apply(xs, ys)
    span_x = px.max() - px.min()
    span_y = py.max() - py.min()
    return int(math.ceil(span_x - 1e-9)) + 1, int(math.ceil(span_y - 1e-9)) + 1


def rotation_homography(width: int, height: int, degrees: float) -> Tuple[Homography, int, int]:
    """Rotation about the image centre, recentred on a canvas holding the whole rotated image."""
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    about_centre = Homography.rotation(degrees, cx, cy)
    out_w, out_h = _canvas_size(width, height, about_centre)
    shift = Homography.translation((out_w - 1) / 2.0 - cx, (out_h - 1) / 2.0 - cy)
    return shift @ about_centre, out_w, out_h


def generate_rotation_series(img: GrayImage, angles: Sequence[float] = ROTATION_ANGLES) -> List[Variant]:
    out = []
    for angle in angles:
        H, out_w, out_h = rotation_homography(img.width, img.height, angle)
        out.append((ConditionSpec("rotation", float(angle), H), warp_homography(img, H, out_w, out_h).image))
    return out


def scaled_size(width: int, height: int, factor: float) -> Tuple[int, int]:
    """Canvas for a scaling about pixel (0, 0): the last pixel lands at (n-1)*factor."""
    return int(math.floor((width - 1) * factor + 1e-9)) + 1, int(math.floor((height - 1) * factor + 1e-9)) + 1


def generate_scale_series(img: GrayImage, factors: Sequence[float] = SCALE_FACTORS) -> List[Variant]:
    out = []
    for factor in factors:
        H = Homography.scaling(factor)
        out_w, out_h = scaled_size(img.width, img.height, factor)
        out.append((ConditionSpec("scale", float(factor), H), warp_homography(img, H, out_w, out_h).image))
    return out


GENERATORS = {
    "exposure": generate_exposure_series,
    "viewpoint": generate_viewpoint_series,
    "rotation": generate_rotation_series,
    "scale": generate_scale_series,
}


def generate_series(img: GrayImage, family: str, grid: Optional[Sequence[float]] = None) -> List[Variant]:
    generator = GENERATORS[family]
    return generator(img) if grid is None else generator(img, grid)


def downscale(img: GrayImage, factor: float) -> GrayImage:
    """Anti-aliased resample about pixel (0, 0); factor 1 returns the input."""
    if factor == 1.0:
        return img
    sigma = 0.5 * math.sqrt(1.0 / factor ** 2 - 1.0)
    blurred = gaussian_blur(img, sigma)
    out_w, out_h = scaled_size(img.width, img.height, factor)
    return warp_homography(blurred, Homography.scaling(factor), out_w, out_h).image


def rescale_homography(H: Optional[Homography], factor: float) -> Optional[Homography]:
    """Conjugate H so it relates images that were both downscaled by ``factor``."""
    if H is None or factor == 1.0:
        return H
    return Homography.scaling(factor) @ H @ Homography.scaling(1.0 / factor)
