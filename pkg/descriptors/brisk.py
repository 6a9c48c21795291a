"""Binary descriptors from smoothed intensity comparisons on a sampling pattern"""
from typing import Tuple, Union

from descriptors.patterns import BRISK_PATTERN, SamplingPattern, binary_tests, pattern_angle, pattern_gradient
from descriptors.sampling import SmoothedSampler
from descriptors.types import BinaryDescriptor
from detectors.keypoint import Keypoint
from errors import OutOfBoundsError
from imaging.image import GrayImage

ImageSource = Union[GrayImage, SmoothedSampler]


def as_sampler(source: ImageSource) -> SmoothedSampler:
    return source if isinstance(source, SmoothedSampler) else SmoothedSampler(source)


def measure_pattern_angle(sampler: SmoothedSampler, kp: Keypoint, pattern: SamplingPattern) -> float:
    """Orientation of the local gradient estimated over the pattern's long pairs."""
    xs, ys, sigmas = pattern.placed(kp.x, kp.y, kp.scale, 0.0)
    if not sampler.fits(xs, ys, sigmas):
        raise OutOfBoundsError(f"{pattern.name} pattern at ({kp.x:.1f}, {kp.y:.1f}) scale {kp.scale:.2f} leaves the image")
    intensities = sampler.sample(xs, ys, sigmas)
    return pattern_angle(*pattern_gradient(pattern.points, intensities, pattern.long_pairs))


def describe_with_pattern(
    source: ImageSource, kp: Keypoint, pattern: SamplingPattern
) -> Tuple[BinaryDescriptor, float]:
    """(descriptor, pattern orientation) for one keypoint."""
    sampler = as_sampler(source)
    angle = measure_pattern_angle(sampler, kp, pattern)
    xs, ys, sigmas = pattern.placed(kp.x, kp.y, kp.scale, angle)
    if not sampler.fits(xs, ys, sigmas):
        raise OutOfBoundsError(f"rotated {pattern.name} pattern at ({kp.x:.1f}, {kp.y:.1f}) leaves the image")
    intensities = sampler.sample(xs, ys, sigmas)
    return BinaryDescriptor(binary_tests(intensities, pattern.short_pairs), pattern.name), angle


def describe_brisk(source: ImageSource, kp: Keypoint) -> BinaryDescriptor:
    descriptor, _ = describe_with_pattern(source, kp, BRISK_PATTERN)
    return descriptor
