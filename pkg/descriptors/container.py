"""FDSC binary container for descriptor sets

Layout (little-endian): magic ``FDSC``, version u8, kind u8, count u32,
dim u16, then ``count`` rows of float32 values or packed bits (lowest bit
index in the least-significant bit of each byte).
"""
import struct
from pathlib import Path
from typing import Union

import numpy as np

from descriptors.types import KINDS_BY_CODE, DescriptorSet
from errors import ImageLoadError

MAGIC = b"FDSC"
VERSION = 1
HEADER = struct.Struct("<4sBBIH")


def encode_descriptors(dset: DescriptorSet) -> bytes:
    header = HEADER.pack(MAGIC, VERSION, dset.spec.code, len(dset), dset.dim)
    if dset.binary:
        payload = dset.data.astype(np.uint8).tobytes()
    else:
        payload = dset.data.astype("<f4").tobytes()
    return header + payload


def decode_descriptors(raw: bytes, source: str = "<bytes>") -> DescriptorSet:
    if len(raw) < HEADER.size:
        raise ImageLoadError(source, "truncated descriptor header", len(raw))
    magic, version, code, count, dim = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ImageLoadError(source, f"bad magic {magic!r}", 0)
    if version != VERSION:
        raise ImageLoadError(source, f"unsupported container version {version}", 4)
    spec = KINDS_BY_CODE.get(code)
    if spec is None:
        raise ImageLoadError(source, f"unknown descriptor kind code {code}", 5)
    if dim != spec.dim:
        raise ImageLoadError(source, f"{spec.tag} descriptors have dim {spec.dim}, header says {dim}", 10)

    row_bytes = dim // 8 if spec.binary else 4 * dim
    expected = HEADER.size + count * row_bytes
    if len(raw) != expected:
        raise ImageLoadError(source, f"payload holds {len(raw) - HEADER.size} bytes, expected {count * row_bytes}", min(len(raw), expected))
    body = raw[HEADER.size:]
    if spec.binary:
        data = np.frombuffer(body, dtype=np.uint8).reshape(count, row_bytes)
    else:
        data = np.frombuffer(body, dtype="<f4").reshape(count, dim)
    return DescriptorSet(spec.tag, data)


def write_descriptors(dset: DescriptorSet, path: Union[str, Path]) -> None:
    Path(path).write_bytes(encode_descriptors(dset))


def read_descriptors(path: Union[str, Path]) -> DescriptorSet:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ImageLoadError(str(path), f"cannot read descriptor file ({e.strerror or e})")
    return decode_descriptors(raw, str(path))
