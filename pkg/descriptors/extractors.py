"""Describe a whole keypoint list with one descriptor kind"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from descriptors.brisk import describe_with_pattern
from descriptors.orientation import assign_orientation
from descriptors.patterns import BRISK_PATTERN, FREAK_PATTERN
from descriptors.sampling import SmoothedSampler
from descriptors.sift import describe_sift
from descriptors.surf import describe_surf
from descriptors.types import Descriptor, DescriptorSet, kind_of
from detectors.keypoint import Keypoint
from errors import DegenerateDescriptorError, InvalidParameterError, OutOfBoundsError
from imaging.filters import GaussianPyramid, IntegralImage, build_gaussian_pyramid, integral_image
from imaging.image import GrayImage

logger = logging.getLogger(__name__)

DESCRIPTOR_TAGS = ("sift", "surf", "brisk", "freak")


@dataclass(frozen=True)
class Extraction:
    """Keypoints that survived description, row-aligned with ``descriptors``."""

    keypoints: List[Keypoint]
    descriptors: DescriptorSet
    dropped: int


class ImageStructures:
    """Per-image pyramid, integral image and smoothed sampler, built on first use.

    One instance can serve every descriptor kind described on the same image.
    """

    def __init__(self, img: GrayImage):
        self.img = img
        self._pyramid: Optional[GaussianPyramid] = None
        self._integral: Optional[IntegralImage] = None
        self._sampler: Optional[SmoothedSampler] = None

    @property
    def pyramid(self) -> GaussianPyramid:
        if self._pyramid is None:
            self._pyramid = build_gaussian_pyramid(self.img)
        return self._pyramid

    @property
    def integral(self) -> IntegralImage:
        if self._integral is None:
            self._integral = integral_image(self.img)
        return self._integral

    @property
    def sampler(self) -> SmoothedSampler:
        if self._sampler is None:
            self._sampler = SmoothedSampler(self.img)
        return self._sampler


class FeatureExtractor:
    """Describes keypoints of one image with one descriptor kind."""

    def __init__(self, img: GrayImage, kind: str, structures: Optional[ImageStructures] = None):
        self.img = img
        self.kind = kind_of(kind).tag
        self.structures = structures if structures is not None else ImageStructures(img)
        if self.structures.img is not img:
            raise InvalidParameterError("image structures belong to a different image")

    def _oriented(self, kp: Keypoint) -> List[Keypoint]:
        pyramid = self.structures.pyramid
        octave, level = pyramid.nearest_level(kp.scale)
        return assign_orientation(pyramid.level(octave, level), kp, 2.0 ** octave)

    def describe_one(self, kp: Keypoint) -> List[tuple]:
        """(keypoint, descriptor) pairs; gradient descriptors may fan out per orientation."""
        if self.kind == "sift":
            pyramid = self.structures.pyramid
            out = []
            for oriented in self._oriented(kp):
                octave, level = pyramid.nearest_level(oriented.scale)
                out.append((oriented, describe_sift(pyramid.level(octave, level), oriented, 2.0 ** octave)))
            return out
        if self.kind == "surf":
            return [(oriented, describe_surf(self.structures.integral, oriented)) for oriented in self._oriented(kp)]
        pattern = BRISK_PATTERN if self.kind == "brisk" else FREAK_PATTERN
        descriptor, angle = describe_with_pattern(self.structures.sampler, kp, pattern)
        return [(kp.with_orientation(angle), descriptor)]

    def extract(self, keypoints: Sequence[Keypoint]) -> Extraction:
        kept: List[Keypoint] = []
        values: List[Descriptor] = []
        dropped = 0
        for kp in keypoints:
            try:
                pairs = self.describe_one(kp)
            except (OutOfBoundsError, DegenerateDescriptorError) as e:
                logger.debug(f"Dropping keypoint at ({kp.x:.1f}, {kp.y:.1f}): {e}")
                dropped += 1
                continue
            if not pairs:
                dropped += 1
            for oriented, descriptor in pairs:
                kept.append(oriented)
                values.append(descriptor)
        logger.info(f"Described {len(values)} {self.kind} features in {self.img}, dropped {dropped} keypoints")
        return Extraction(kept, DescriptorSet.from_descriptors(values, self.kind), dropped)


def describe_keypoints(
    img: GrayImage, keypoints: Sequence[Keypoint], kind: str, structures: Optional[ImageStructures] = None
) -> Extraction:
    return FeatureExtractor(img, kind, structures).extract(keypoints)
