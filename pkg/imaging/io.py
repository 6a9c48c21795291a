"""Image and homography file readers/writers

Binary PGM (P5) is decoded natively; PNG goes through OpenCV when it is
installed. Every decoding failure is reported as ImageLoadError naming the
file, the byte offset (when known) and the reason.
"""
import logging
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from errors import ImageLoadError, InvalidParameterError
from imaging.geometry import Homography
from imaging.image import GrayImage, to_gray

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = b" \t\r\n\x0b\x0c"


def _pgm_token(raw: bytes, pos: int, path: str) -> Tuple[bytes, int]:
    """Next header token starting at ``pos``, skipping whitespace and comments."""
    while pos < len(raw):
        if raw[pos] in _WHITESPACE:
            pos += 1
        elif raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < len(raw) and raw[pos] not in _WHITESPACE and raw[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise ImageLoadError(path, "truncated PGM header", start)
    return raw[start:pos], pos


def _header_int(token: bytes, offset: int, what: str, path: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise ImageLoadError(path, f"invalid {what} {token!r}", offset)
    if value < 1:
        raise ImageLoadError(path, f"{what} must be positive, got {value}", offset)
    return value


def decode_pgm(raw: bytes, path: str = "<bytes>") -> GrayImage:
    if raw[:2] != b"P5":
        raise ImageLoadError(path, "not a binary PGM (missing P5 magic)", 0)
    pos = 2
    fields = []
    for what in ("width", "height", "maxval"):
        token, end = _pgm_token(raw, pos, path)
        fields.append(_header_int(token, end - len(token), what, path))
        pos = end
    width, height, maxval = fields
    if maxval > 255:
        raise ImageLoadError(path, f"only 8-bit PGM is supported, maxval is {maxval}", pos - 1)
    if pos >= len(raw) or raw[pos] not in _WHITESPACE:
        raise ImageLoadError(path, "missing whitespace after PGM header", pos)
    pos += 1

    expected = width * height
    payload = raw[pos:pos + expected]
    if len(payload) < expected:
        raise ImageLoadError(path, f"expected {expected} pixel bytes, found {len(payload)}", pos + len(payload))
    data = np.frombuffer(payload, dtype=np.uint8).reshape(height, width).astype(np.float64)
    if maxval != 255:
        data = data * (255.0 / maxval)
    return GrayImage(data)


def decode_png(raw: bytes, path: str = "<bytes>") -> GrayImage:
    try:
        import cv2
    except ImportError:
        raise ImageLoadError(path, "PNG support needs opencv-python-headless", 0)
    pixels = cv2.imdecode(np.frombuffer(raw, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if pixels is None:
        raise ImageLoadError(path, "corrupt or unsupported PNG stream", 0)
    scale = 255.0 / 65535.0 if pixels.dtype == np.uint16 else 1.0
    pixels = pixels.astype(np.float64) * scale
    if pixels.ndim == 3:
        # OpenCV decodes to BGR(A)
        pixels = pixels[..., [2, 1, 0]]
    return to_gray(pixels)


def load_image(path: PathLike) -> GrayImage:
    """Load a PGM (P5) or PNG file as a GrayImage in [0, 255]."""
    name = str(path)
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ImageLoadError(name, f"cannot read file ({e.strerror or e})")
    if raw.startswith(b"P5"):
        img = decode_pgm(raw, name)
    elif raw.startswith(PNG_MAGIC):
        img = decode_png(raw, name)
    else:
        raise ImageLoadError(name, "unrecognised image format", 0)
    logger.debug(f"Loaded {name} ({img.width}x{img.height})")
    return img


def encode_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.to_uint8().tobytes()


def save_pgm(img: GrayImage, path: PathLike) -> None:
    Path(path).write_bytes(encode_pgm(img))


def parse_homography(text: str, path: str = "<text>") -> Homography:
    tokens = text.split()
    if len(tokens) != 9:
        raise ImageLoadError(path, f"homography needs 9 numbers, found {len(tokens)}")
    try:
        values = [float(t) for t in tokens]
    except ValueError as e:
        raise ImageLoadError(path, f"invalid homography entry: {e}")
    try:
        return Homography(np.array(values).reshape(3, 3))
    except InvalidParameterError as e:
        raise ImageLoadError(path, str(e))


def load_homography(path: PathLike) -> Homography:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ImageLoadError(str(path), f"cannot read homography ({e})")
    return parse_homography(text, str(path))


def save_homography(H: Homography, path: PathLike) -> None:
    Path(path).write_text(H.to_text(), encoding="utf-8")
