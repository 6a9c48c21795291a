"""Raster primitives: images, scale space, integral images, warps, exposure"""
from .image import GrayImage, to_gray
from .filters import (
    GaussianPyramid,
    IntegralImage,
    box_sum,
    box_sums,
    build_gaussian_pyramid,
    difference_of_gaussians,
    gaussian_blur,
    gaussian_kernel,
    gradient_field,
    gradient_mag_ori,
    integral_image,
)
from .geometry import Homography, WarpResult, warp_homography
from .photometric import adjust_exposure, exposure_gain
from .io import load_homography, load_image, save_homography, save_pgm

__all__ = [
    "GrayImage",
    "to_gray",
    "GaussianPyramid",
    "IntegralImage",
    "box_sum",
    "box_sums",
    "build_gaussian_pyramid",
    "difference_of_gaussians",
    "gaussian_blur",
    "gaussian_kernel",
    "gradient_field",
    "gradient_mag_ori",
    "integral_image",
    "Homography",
    "WarpResult",
    "warp_homography",
    "adjust_exposure",
    "exposure_gain",
    "load_homography",
    "load_image",
    "save_homography",
    "save_pgm",
]
