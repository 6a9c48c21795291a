"""GrayImage, the single-channel raster every detector and descriptor consumes"""
from dataclasses import dataclass

import numpy as np

from errors import InvalidParameterError

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major float64 intensities, canonical range [0, 255].

    ``data`` has shape (height, width) and is made read-only on construction
    so instances can be shared between threads.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise InvalidParameterError(f"GrayImage needs a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidParameterError(f"GrayImage needs at least 1x1 pixels, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("GrayImage samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self):
        return self.data.shape

    @property
    def min_dimension(self) -> int:
        return min(self.data.shape)

    def at(self, x: int, y: int) -> float:
        return float(self.data[y, x])

    def to_uint8(self) -> np.ndarray:
        """8-bit export: round half away from zero, then clamp."""
        return np.clip(np.floor(self.data + 0.5), 0, 255).astype(np.uint8)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"GrayImage({self.width}x{self.height})"


def to_gray(pixels: np.ndarray) -> GrayImage:
    """Convert an (H, W) or (H, W, 3|4) RGB(A) array to a GrayImage."""
    arr = np.asarray(pixels, dtype=np.float64)
    if arr.ndim == 2:
        return GrayImage(arr)
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
        return GrayImage(LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b)
    raise InvalidParameterError(f"cannot convert array of shape {arr.shape} to grayscale")
