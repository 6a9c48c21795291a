"""Keypoint record shared by every detector and descriptor"""
import math
from dataclasses import dataclass, replace
from typing import Iterable, List

from errors import InvalidParameterError


def canonical_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.atan2(math.sin(theta), math.cos(theta))
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class Keypoint:
    """A detection in original-image pixels.

    ``scale`` is the characteristic sigma, ``orientation`` is 0 until a
    descriptor assigns one, ``detector`` tags the producing detector.
    """

    x: float
    y: float
    scale: float
    orientation: float = 0.0
    response: float = 0.0
    octave: int = 0
    detector: str = ""

    def __post_init__(self):
        for name in ("x", "y", "scale", "orientation", "response"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"keypoint {name} must be finite, got {value}")
        if self.scale <= 0:
            raise InvalidParameterError(f"keypoint scale must be positive, got {self.scale}")
        if self.response < 0:
            raise InvalidParameterError(f"keypoint response must be non-negative, got {self.response}")

    def with_orientation(self, theta: float) -> "Keypoint":
        return replace(self, orientation=canonical_angle(theta))

    def inside(self, width: int, height: int) -> bool:
        return 0 <= self.x < width and 0 <= self.y < height


def sort_key(kp: Keypoint):
    return (-kp.response, kp.y, kp.x, kp.scale)


def sort_keypoints(keypoints: Iterable[Keypoint]) -> List[Keypoint]:
    """Order by response descending, ties broken by (y, x, scale) ascending."""
    return sorted(keypoints, key=sort_key)
