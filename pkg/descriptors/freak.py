"""Retina-like binary descriptor"""
from descriptors.brisk import ImageSource, describe_with_pattern
from descriptors.patterns import FREAK_PATTERN
from descriptors.types import BinaryDescriptor
from detectors.keypoint import Keypoint


def describe_freak(source: ImageSource, kp: Keypoint) -> BinaryDescriptor:
    """Coarse peripheral pairs occupy the lowest bit indices."""
    descriptor, _ = describe_with_pattern(source, kp, FREAK_PATTERN)
    return descriptor
