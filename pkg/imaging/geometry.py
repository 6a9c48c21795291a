"""Planar homographies and inverse-mapped warping"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from errors import InvalidParameterError
from imaging.image import GrayImage

DET_EPSILON = 1e-12
# Sample positions this close outside the source are treated as on the edge.
EDGE_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Homography:
    """Invertible 3x3 projective map, stored with h22 == 1 whenever h22 != 0."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64, copy=True)
        if m.shape != (3, 3):
            raise InvalidParameterError(f"homography must be 3x3, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidParameterError("homography entries must be finite")
        if m[2, 2] != 0.0:
            m = m / m[2, 2]
        scale = max(np.abs(m).max(), 1.0)
        if abs(np.linalg.det(m)) <= DET_EPSILON * scale ** 3:
            raise InvalidParameterError("homography is singular")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, tx: float, ty: float) -> "Homography":
        return cls(np.array([[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]]))

    @classmethod
    def scaling(cls, sx: float, sy: float = None) -> "Homography":
        sy = sx if sy is None else sy
        return cls(np.diag([sx, sy, 1.0]))

    @classmethod
    def rotation(cls, degrees: float, cx: float = 0.0, cy: float = 0.0) -> "Homography":
        """Rotation about (cx, cy); multiples of 90 degrees are exact."""
        c, s = exact_cos_sin(degrees)
        r = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return cls.translation(cx, cy) @ cls(r) @ cls.translation(-cx, -cy)

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.matrix))

    def __matmul__(self, other: "Homography") -> "Homography":
        return Homography(self.matrix @ other.matrix)

    def apply(self, xs, ys) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Project points; returns (x', y', w) without dividing by small w."""
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        m = self.matrix
        u = m[0, 0] * xs + m[0, 1] * ys + m[0, 2]
        v = m[1, 0] * xs + m[1, 1] * ys + m[1, 2]
        w = m[2, 0] * xs + m[2, 1] * ys + m[2, 2]
        with np.errstate(divide="ignore", invalid="ignore"):
            return u / w, v / w, w

    def allclose(self, other: "Homography", atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=atol))

    def to_text(self) -> str:
        return "\n".join(" ".join(repr(float(v)) for v in row) for row in self.matrix) + "\n"

    def __repr__(self):
        return f"Homography({self.matrix.tolist()})"


def exact_cos_sin(degrees: float) -> Tuple[float, float]:
    """cos/sin with multiples of 90 degrees snapped to exact 0 and +-1."""
    quarter = degrees / 90.0
    if float(quarter).is_integer():
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][int(quarter) % 4]
    rad = math.radians(degrees)
    return math.cos(rad), math.sin(rad)


@dataclass(frozen=True, eq=False)
class WarpResult:
    """Warped image plus a boolean mask of pixels that map inside the source."""

    image: GrayImage
    valid: np.ndarray


def warp_homography(img: GrayImage, H: Homography, out_w: int, out_h: int) -> WarpResult:
    """Warp ``img`` by ``H`` into an out_w x out_h canvas using inverse bilinear mapping."""
    if out_w < 1 or out_h < 1:
        raise InvalidParameterError(f"output size must be positive, got {out_w}x{out_h}")
    inv = H.inverse()
    ys, xs = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    sx, sy, w = inv.apply(xs, ys)

    finite = np.isfinite(sx) & np.isfinite(sy) & (np.abs(w) > 1e-12)
    valid = (
        finite
        & (sx >= -EDGE_TOLERANCE) & (sx <= img.width - 1 + EDGE_TOLERANCE)
        & (sy >= -EDGE_TOLERANCE) & (sy <= img.height - 1 + EDGE_TOLERANCE)
    )
    sx = np.where(valid, np.clip(sx, 0, img.width - 1), 0.0)
    sy = np.where(valid, np.clip(sy, 0, img.height - 1), 0.0)

    sampled = ndimage.map_coordinates(img.data, [sy, sx], order=1, mode="nearest")
    out = np.where(valid, sampled, 0.0)
    valid.setflags(write=False)
    return WarpResult(image=GrayImage(out), valid=valid)
