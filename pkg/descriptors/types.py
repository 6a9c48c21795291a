"""Descriptor value types and packed descriptor sets"""
from dataclasses import dataclass
from typing import Dict, List, Sequence, Union

import numpy as np

from errors import IncompatibleDescriptorError, InvalidParameterError

BINARY_BITS = 512


@dataclass(frozen=True)
class DescriptorKind:
    tag: str
    code: int
    binary: bool
    dim: int


KINDS: Dict[str, DescriptorKind] = {
    "sift": DescriptorKind("sift", 1, False, 128),
    "surf": DescriptorKind("surf", 2, False, 64),
    "brisk": DescriptorKind("brisk", 3, True, BINARY_BITS),
    "freak": DescriptorKind("freak", 4, True, BINARY_BITS),
}
KINDS_BY_CODE = {k.code: k for k in KINDS.values()}


def kind_of(tag: str) -> DescriptorKind:
    try:
        return KINDS[tag]
    except KeyError:
        raise InvalidParameterError(f"unknown descriptor kind {tag!r}; expected one of {sorted(KINDS)}")


@dataclass(frozen=True, eq=False)
class FloatDescriptor:
    """Unit-norm real vector (128-D SIFT, 64-D SURF)."""

    values: np.ndarray
    kind: str

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64, copy=True)
        spec = kind_of(self.kind)
        if spec.binary or arr.shape != (spec.dim,):
            raise InvalidParameterError(f"{self.kind} descriptor needs {spec.dim} real values, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("descriptor values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return len(self.values)

    def __eq__(self, other):
        return isinstance(other, FloatDescriptor) and self.kind == other.kind and bool(np.array_equal(self.values, other.values))


@dataclass(frozen=True, eq=False)
class BinaryDescriptor:
    """512-bit vector; bit i is the outcome of pair i."""

    bits: np.ndarray
    kind: str

    def __post_init__(self):
        arr = np.array(self.bits, dtype=bool, copy=True)
        spec = kind_of(self.kind)
        if not spec.binary or arr.shape != (spec.dim,):
            raise InvalidParameterError(f"{self.kind} descriptor needs {spec.dim} bits, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @property
    def dim(self) -> int:
        return len(self.bits)

    def packed(self) -> np.ndarray:
        """Bytes with the lowest bit index in the least-significant bit."""
        return np.packbits(self.bits, bitorder="little")

    def __eq__(self, other):
        return isinstance(other, BinaryDescriptor) and self.kind == other.kind and bool(np.array_equal(self.bits, other.bits))


Descriptor = Union[FloatDescriptor, BinaryDescriptor]


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    """Row-per-descriptor matrix: float32 values, or packed uint8 bits for binary kinds."""

    kind: str
    data: np.ndarray

    def __post_init__(self):
        spec = kind_of(self.kind)
        dtype = np.uint8 if spec.binary else np.float32
        width = spec.dim // 8 if spec.binary else spec.dim
        arr = np.array(self.data, dtype=dtype, copy=True).reshape(-1, width)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def spec(self) -> DescriptorKind:
        return KINDS[self.kind]

    @property
    def binary(self) -> bool:
        return self.spec.binary

    @property
    def dim(self) -> int:
        return self.spec.dim

    def __len__(self) -> int:
        return self.data.shape[0]

    def row(self, i: int) -> Descriptor:
        if self.binary:
            bits = np.unpackbits(self.data[i], bitorder="little").astype(bool)
            return BinaryDescriptor(bits, self.kind)
        return FloatDescriptor(self.data[i].astype(np.float64), self.kind)

    def descriptors(self) -> List[Descriptor]:
        return [self.row(i) for i in range(len(self))]

    @classmethod
    def empty(cls, kind: str) -> "DescriptorSet":
        return cls(kind, np.zeros((0,), dtype=np.uint8 if kind_of(kind).binary else np.float32))

    @classmethod
    def from_descriptors(cls, descriptors: Sequence[Descriptor], kind: str = None) -> "DescriptorSet":
        if not descriptors:
            if kind is None:
                raise InvalidParameterError("kind is required for an empty descriptor set")
            return cls.empty(kind)
        kind = kind or descriptors[0].kind
        if any(d.kind != kind for d in descriptors):
            raise IncompatibleDescriptorError(f"descriptor set mixes kinds with {kind!r}")
        if kind_of(kind).binary:
            return cls(kind, np.stack([d.packed() for d in descriptors]))
        return cls(kind, np.stack([d.values for d in descriptors]).astype(np.float32))
