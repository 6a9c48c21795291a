"""Exposure changes modelled as a dyadic gain"""
import numpy as np

from imaging.image import GrayImage


def exposure_gain(ev: float) -> float:
    """Gain applied for an exposure offset: +-4 doubles or halves brightness."""
    return 2.0 ** (ev / 4.0)


def adjust_exposure(img: GrayImage, ev: float, clamp: bool = True) -> GrayImage:
    out = img.data * exposure_gain(ev)
    if clamp:
        out = np.clip(out, 0.0, 255.0)
    return GrayImage(out)
