"""Descriptors: gradient histograms, Haar sums and binary pattern tests"""
from .types import (
    BINARY_BITS,
    KINDS,
    BinaryDescriptor,
    Descriptor,
    DescriptorKind,
    DescriptorSet,
    FloatDescriptor,
    kind_of,
)
from .orientation import assign_orientation
from .sift import clamp_normalize, describe_sift
from .surf import describe_surf, haar_subregion_vector
from .sampling import SmoothedSampler
from .patterns import BRISK_PATTERN, FREAK_PATTERN, SamplingPattern
from .brisk import describe_brisk
from .freak import describe_freak
from .container import decode_descriptors, encode_descriptors, read_descriptors, write_descriptors
from .extractors import DESCRIPTOR_TAGS, Extraction, FeatureExtractor, ImageStructures, describe_keypoints

__all__ = [
    "BINARY_BITS",
    "KINDS",
    "BinaryDescriptor",
    "Descriptor",
    "DescriptorKind",
    "DescriptorSet",
    "FloatDescriptor",
    "kind_of",
    "assign_orientation",
    "clamp_normalize",
    "describe_sift",
    "describe_surf",
    "haar_subregion_vector",
    "SmoothedSampler",
    "BRISK_PATTERN",
    "FREAK_PATTERN",
    "SamplingPattern",
    "describe_brisk",
    "describe_freak",
    "decode_descriptors",
    "encode_descriptors",
    "read_descriptors",
    "write_descriptors",
    "DESCRIPTOR_TAGS",
    "Extraction",
    "FeatureExtractor",
    "ImageStructures",
    "describe_keypoints",
]
