"""RGB image carrier and a binary PPM (P6) codec.

Keyframes enter the engine either as pre-decoded feature rows in a manifest
or as P6 image files; no other image format is decoded here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TruncatedData, UnsupportedFormat


@dataclass(frozen=True, eq=False)
class Image:
    """An RGB raster; ``data`` has shape (height, width, 3), dtype uint8."""

    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) array, got shape {self.data.shape}")
        if self.data.dtype != np.uint8:
            raise ValueError(f"expected uint8 pixels, got {self.data.dtype}")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def pixels(self) -> np.ndarray:
        """Row-major (width*height, 3) view of the pixel values."""
        return self.data.reshape(-1, 3)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))


def image_from_pixels(width: int, height: int, pixels) -> Image:
    """Build an Image from a row-major iterable of (r, g, b) triples."""
    arr = np.asarray(pixels, dtype=np.int64)
    if arr.size != width * height * 3:
        raise ValueError(f"expected {width * height} pixels, got {arr.size // 3}")
    if arr.min(initial=0) < 0 or arr.max(initial=0) > 255:
        raise ValueError("channel values must lie in [0, 255]")
    return Image(arr.reshape(height, width, 3).astype(np.uint8))


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comment lines, then read one token.
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise TruncatedData("PPM header ended unexpectedly")
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def decode_ppm(data: bytes) -> Image:
    """Decode a binary PPM (P6, maxval 255) byte stream.

    Raises UnsupportedFormat for anything that is not plain 8-bit P6 and
    TruncatedData when the payload is shorter than width*height*3 bytes.
    """
    if not data.startswith(b"P6"):
        raise UnsupportedFormat("only binary PPM (P6) is supported")
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _read_header_token(data, pos)
        if not token.isdigit():
            raise UnsupportedFormat(f"bad PPM header token: {token!r}")
        fields.append(int(token))
    width, height, maxval = fields
    if maxval != 255:
        raise UnsupportedFormat(f"only maxval 255 is supported, got {maxval}")
    if width <= 0 or height <= 0:
        raise UnsupportedFormat(f"bad PPM dimensions {width}x{height}")
    pos += 1  # single whitespace byte after maxval
    need = width * height * 3
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise TruncatedData(f"need {need} payload bytes, got {len(payload)}")
    arr = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    return Image(arr.copy())


def encode_ppm(image: Image) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.data.tobytes()


def load_ppm(path) -> Image:
    with open(path, "rb") as fh:
        return decode_ppm(fh.read())
